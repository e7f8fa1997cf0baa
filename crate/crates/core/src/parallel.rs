//! Parallel iteration with a sequential fallback.
//!
//! With the `parallel` feature (default) this re-exports the rayon
//! prelude; without it, a shim provides the same `par_iter` /
//! `into_par_iter` surface backed by ordinary sequential iterators, so
//! call sites compile unchanged. Every parallel region in this crate
//! is a pure map over independent tasks followed by an order-preserving
//! collect, so both builds produce identical results.

#[cfg(feature = "parallel")]
pub use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    rayon::join(a, b)
}

#[cfg(not(feature = "parallel"))]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA,
    B: FnOnce() -> RB,
{
    (a(), b())
}

#[cfg(not(feature = "parallel"))]
mod seq {
    //! Sequential stand-ins for the rayon entry points used in this crate.

    pub trait IntoParallelIterator: IntoIterator + Sized {
        fn into_par_iter(self) -> Self::IntoIter {
            self.into_iter()
        }
    }

    impl<T: IntoIterator + Sized> IntoParallelIterator for T {}

    pub trait ParIterExt {
        type Item;
        type Iter: Iterator<Item = Self::Item>;
        fn par_iter(self) -> Self::Iter;
    }

    impl<'a, T: 'a> ParIterExt for &'a [T] {
        type Item = &'a T;
        type Iter = std::slice::Iter<'a, T>;
        fn par_iter(self) -> Self::Iter {
            self.iter()
        }
    }

    impl<'a, T: 'a> ParIterExt for &'a Vec<T> {
        type Item = &'a T;
        type Iter = std::slice::Iter<'a, T>;
        fn par_iter(self) -> Self::Iter {
            self.iter()
        }
    }

    pub trait ParIterMutExt {
        type Item;
        type Iter: Iterator<Item = Self::Item>;
        fn par_iter_mut(self) -> Self::Iter;
    }

    impl<'a, T: 'a> ParIterMutExt for &'a mut [T] {
        type Item = &'a mut T;
        type Iter = std::slice::IterMut<'a, T>;
        fn par_iter_mut(self) -> Self::Iter {
            self.iter_mut()
        }
    }

    impl<'a, T: 'a> ParIterMutExt for &'a mut Vec<T> {
        type Item = &'a mut T;
        type Iter = std::slice::IterMut<'a, T>;
        fn par_iter_mut(self) -> Self::Iter {
            self.iter_mut()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub use seq::{IntoParallelIterator, ParIterExt as _, ParIterMutExt as _};

#[cfg(test)]
mod tests {
    #[allow(unused_imports)]
    use super::*;

    #[test]
    fn map_collect_preserves_order() {
        let input: Vec<u32> = (0..1000).collect();
        #[cfg(feature = "parallel")]
        let out: Vec<u32> = input.par_iter().map(|x| x * 2).collect();
        #[cfg(not(feature = "parallel"))]
        let out: Vec<u32> = input.par_iter().map(|x| x * 2).collect();
        assert_eq!(out[3], 6);
        assert!(out.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn join_returns_both() {
        let (a, b) = join(|| 1 + 1, || "x".to_string());
        assert_eq!(a, 2);
        assert_eq!(b, "x");
    }
}
