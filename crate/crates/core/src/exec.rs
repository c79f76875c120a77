//! Chunk executors. Monte-Carlo routines describe their work as a number of
//! independent chunks producing a [`Tally`]; an executor evaluates them and
//! merges the tallies in chunk order. Tallies are integer counts, so the
//! merged result does not depend on scheduling.

use alloc::vec::Vec;

use crate::error::Result;

pub trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

macro_rules! count_tally {
    ($($n:literal)*) => {$(
        impl Tally for [u64; $n] {
            fn merge(&mut self, other: Self) {
                for (a, b) in self.iter_mut().zip(other) {
                    *a += b;
                }
            }
        }
    )*};
}

count_tally!(1 2 3 4 8 16);

impl<T: Tally> Tally for Vec<T> {
    fn merge(&mut self, other: Self) {
        if self.is_empty() {
            *self = other;
            return;
        }
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

pub trait ChunkExecutor: Sync {
    fn run<T, F>(&self, chunks: u32, f: F) -> Result<T>
    where
        T: Tally,
        F: Fn(u32) -> Result<T> + Sync + Send;
}

/// Evaluates chunks one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl ChunkExecutor for Sequential {
    fn run<T, F>(&self, chunks: u32, f: F) -> Result<T>
    where
        T: Tally,
        F: Fn(u32) -> Result<T> + Sync + Send,
    {
        let mut acc = T::default();
        for c in 0..chunks {
            acc.merge(f(c)?);
        }
        Ok(acc)
    }
}
