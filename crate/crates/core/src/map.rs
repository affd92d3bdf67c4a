//! Coupled operators `F: X × X → X` and `F: X × X → finite subsets of X`.

use crate::error::Result;
use crate::point::Point;
use crate::set::FiniteSet;

/// Single-valued coupled operator. `eval` must be deterministic.
pub trait CoupledMap: Send + Sync {
    fn eval(&self, x: &Point, y: &Point) -> Result<Point>;
}

/// Set-valued coupled operator with nonempty finite images.
pub trait CoupledMultiMap: Send + Sync {
    fn eval(&self, x: &Point, y: &Point) -> Result<FiniteSet>;
}

impl<M: CoupledMap + ?Sized> CoupledMap for &M {
    fn eval(&self, x: &Point, y: &Point) -> Result<Point> {
        (**self).eval(x, y)
    }
}

impl<M: CoupledMap + ?Sized> CoupledMap for std::sync::Arc<M> {
    fn eval(&self, x: &Point, y: &Point) -> Result<Point> {
        (**self).eval(x, y)
    }
}

impl<M: CoupledMultiMap + ?Sized> CoupledMultiMap for &M {
    fn eval(&self, x: &Point, y: &Point) -> Result<FiniteSet> {
        (**self).eval(x, y)
    }
}

impl<M: CoupledMultiMap + ?Sized> CoupledMultiMap for std::sync::Arc<M> {
    fn eval(&self, x: &Point, y: &Point) -> Result<FiniteSet> {
        (**self).eval(x, y)
    }
}

/// Adapts an infallible closure into a [`CoupledMap`].
#[derive(Clone)]
pub struct FnMap<F>(pub F);

impl<F> CoupledMap for FnMap<F>
where
    F: Fn(&Point, &Point) -> Point + Send + Sync,
{
    fn eval(&self, x: &Point, y: &Point) -> Result<Point> {
        Ok((self.0)(x, y))
    }
}

/// Adapts a closure returning image points into a [`CoupledMultiMap`].
#[derive(Clone)]
pub struct FnMultiMap<F>(pub F);

impl<F> CoupledMultiMap for FnMultiMap<F>
where
    F: Fn(&Point, &Point) -> Vec<Point> + Send + Sync,
{
    fn eval(&self, x: &Point, y: &Point) -> Result<FiniteSet> {
        FiniteSet::new((self.0)(x, y))
    }
}

/// Views a single-valued map as a set-valued one with singleton images.
#[derive(Clone)]
pub struct Singleton<M>(pub M);

impl<M: CoupledMap> CoupledMultiMap for Singleton<M> {
    fn eval(&self, x: &Point, y: &Point) -> Result<FiniteSet> {
        Ok(FiniteSet::singleton(self.0.eval(x, y)?))
    }
}

/// Scalar closure `f(x, y)` applied coordinate by coordinate.
pub fn componentwise<F>(f: F) -> FnMap<impl Fn(&Point, &Point) -> Point + Send + Sync + Clone>
where
    F: Fn(f64, f64) -> f64 + Send + Sync + Clone,
{
    FnMap(move |x: &Point, y: &Point| {
        Point::new(
            x.coords()
                .iter()
                .zip(y.coords())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn componentwise_applies_per_coordinate() {
        let f = componentwise(|x, y| x + 2.0 * y);
        let out = f
            .eval(&Point::from([1.0, 2.0]), &Point::from([10.0, 20.0]))
            .unwrap();
        assert_eq!(out, Point::from([21.0, 42.0]));
    }

    #[test]
    fn singleton_wraps() {
        let f = Singleton(componentwise(|x, y| (x + y) / 5.0));
        let img = f.eval(&0.0.into(), &1.0.into()).unwrap();
        assert_eq!(img.points(), &[Point::scalar(0.2)]);
    }

    #[test]
    fn multi_map_rejects_empty_image() {
        let f = FnMultiMap(|_: &Point, _: &Point| Vec::new());
        assert!(f.eval(&0.0.into(), &0.0.into()).is_err());
    }
}
