// @generated by tsop from object spec sha256:55f693cd8df50e1ae400df8d79548761a6f88db37eee25bf860819b5e747c95f
// Do not edit; regenerate with `tsop generate`.
//
// object Cell
// protocol *read . (VALUE . (write + 1))
// states over (VALUE, read, write):
//   #0 000
//   #1 100
//   #2 0$0
//   #3 001
//   #4 1$0
//   #5 101
//   #6 0$1
//   #7 1$1

#![allow(
    non_snake_case,
    non_camel_case_types,
    dead_code,
    unused_variables,
    clippy::all
)]

use std::fmt;
use std::marker::PhantomData;
use std::sync::{Condvar, Mutex, MutexGuard, PoisonError};

/// A message arrived in a state without a receive transition for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolViolation {
    pub tag: &'static str,
    pub state: usize,
    pub counters: &'static str,
}

impl fmt::Display for ProtocolViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "protocol violation on Cell: `{}` received in state #{} ({})",
            self.tag, self.state, self.counters
        )
    }
}

impl std::error::Error for ProtocolViolation {}

fn wait<'a, T>(cv: &Condvar, guard: MutexGuard<'a, T>) -> MutexGuard<'a, T> {
    cv.wait(guard).unwrap_or_else(PoisonError::into_inner)
}

const LABELS: [&str; 8] = ["000", "100", "0$0", "001", "1$0", "101", "0$1", "1$1"];

struct Inner<V> {
    state: usize,
    queue_VALUE: Option<(V, V)>,
    queue_read: usize,
    values: PhantomData<fn() -> V>,
}

pub struct Cell<V> {
    lock: Mutex<Inner<V>>,
    try_read: Condvar,
    try_write: Condvar,
}

impl<V: Clone> Cell<V> {
    /// An instance in the initial state, before the constructor sends.
    pub(crate) fn uninit() -> Self {
        Cell {
            lock: Mutex::new(Inner {
                state: 0,
                queue_VALUE: None,
                queue_read: 0,
                values: PhantomData,
            }),
            try_read: Condvar::new(),
            try_write: Condvar::new(),
        }
    }

    pub fn new() -> Result<Self, ProtocolViolation>
    where
        V: From<&'static str> + From<i64>,
    {
        let this = Self::uninit();
        this.run_init()?;
        Ok(this)
    }

    /// The constructor sends.
    pub(crate) fn run_init(&self) -> Result<(), ProtocolViolation>
    where
        V: From<&'static str> + From<i64>,
    {
        self.VALUE(V::from("empty"), V::from(0i64))?;
        Ok(())
    }

    /// Index of the current automaton state.
    pub fn current_state(&self) -> usize {
        self.lock().state
    }

    /// Counter tuple of the current state.
    pub fn counters(&self) -> &'static str {
        LABELS[self.lock().state]
    }

    fn lock(&self) -> MutexGuard<'_, Inner<V>> {
        self.lock.lock().unwrap_or_else(PoisonError::into_inner)
    }

    fn violation(tag: &'static str, state: usize) -> ProtocolViolation {
        ProtocolViolation {
            tag,
            state,
            counters: LABELS[state],
        }
    }

    fn wake(&self, state: usize) {
        match state {
            4 => self.try_read.notify_all(),
            5 => self.try_write.notify_all(),
            7 => {
                self.try_read.notify_all();
                self.try_write.notify_all();
            }
            _ => {}
        }
    }

    pub(crate) fn VALUE(&self, v: V, version: V) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_VALUE = Some((v, version));
        match inner.state {
            0 => inner.state = 1,
            2 => {
                inner.state = 4;
                self.try_read.notify_all();
            }
            3 => {
                inner.state = 5;
                self.try_write.notify_all();
            }
            6 => {
                inner.state = 7;
                self.try_read.notify_all();
                self.try_write.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("VALUE", s));
            }
        }
        Ok(())
    }

    pub fn read(&self) -> Result<V, ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_read += 1;
        match inner.state {
            0 => inner.state = 2,
            1 => {
                inner.state = 4;
                self.try_read.notify_all();
            }
            2 | 4 | 6 | 7 => {}
            3 => inner.state = 6,
            5 => {
                inner.state = 7;
                self.try_read.notify_all();
                self.try_write.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("read", s));
            }
        }
        loop {
            match inner.state {
                4 => {
                    inner.queue_read -= 1;
                    let (v, n) = inner.queue_VALUE.take().expect("VALUE pending");
                    inner.state = if inner.queue_read == 0 { 0 } else { 2 };
                    drop(inner);
                    return self.when_VALUE_read(v, n);
                }
                7 => {
                    inner.queue_read -= 1;
                    let (v, n) = inner.queue_VALUE.take().expect("VALUE pending");
                    inner.state = if inner.queue_read == 0 { 3 } else { 6 };
                    drop(inner);
                    return self.when_VALUE_read(v, n);
                }
                _ => inner = wait(&self.try_read, inner),
            }
        }
    }

    pub fn write(&self, v: V, version: V) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => inner.state = 3,
            1 => {
                inner.state = 5;
                self.try_write.notify_all();
            }
            2 => inner.state = 6,
            4 => {
                inner.state = 7;
                self.try_read.notify_all();
                self.try_write.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("write", s));
            }
        }
        loop {
            match inner.state {
                5 => {
                    let (v, m) = (v, version);
                    let (old, n) = inner.queue_VALUE.take().expect("VALUE pending");
                    inner.state = 0;
                    drop(inner);
                    return self.when_VALUE_write(old, n, v, m);
                }
                7 => {
                    let (v, m) = (v, version);
                    let (old, n) = inner.queue_VALUE.take().expect("VALUE pending");
                    inner.state = 2;
                    drop(inner);
                    return self.when_VALUE_write(old, n, v, m);
                }
                _ => inner = wait(&self.try_write, inner),
            }
        }
    }

    fn when_VALUE_read(&self, v: V, n: V) -> Result<V, ProtocolViolation> {
        self.VALUE(v.clone(), n)?;
        Ok(v)
    }

    fn when_VALUE_write(&self, old: V, n: V, v: V, m: V) -> Result<(), ProtocolViolation> {
        self.VALUE(v, m)?;
        Ok(())
    }
}
