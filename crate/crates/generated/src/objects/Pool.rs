// @generated by tsop from object spec sha256:fc004f1a70b0d15cb70e78472ccfefaaa187a24bbf922b11e37d730e30eef64a
// Do not edit; regenerate with `tsop generate`.
//
// object Pool
// protocol *acquire . (TOKEN + release) . (TOKEN + release)
// states over (TOKEN, acquire, release):
//   #0 000
//   #1 100
//   #2 0$0
//   #3 001
//   #4 200
//   #5 1$0
//   #6 101
//   #7 0$1
//   #8 002
//   #9 2$0
//   #10 1$1
//   #11 0$2

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
            "protocol violation on Pool: `{}` received in state #{} ({})",
            self.tag, self.state, self.counters
        )
    }
}

impl std::error::Error for ProtocolViolation {}

fn wait<'a, T>(cv: &Condvar, guard: MutexGuard<'a, T>) -> MutexGuard<'a, T> {
    cv.wait(guard).unwrap_or_else(PoisonError::into_inner)
}

const LABELS: [&str; 12] = [
    "000", "100", "0$0", "001", "200", "1$0", "101", "0$1", "002", "2$0", "1$1", "0$2",
];

struct Inner<V> {
    state: usize,
    queue_acquire: usize,
    values: PhantomData<fn() -> V>,
}

pub struct Pool<V> {
    lock: Mutex<Inner<V>>,
    try_acquire: Condvar,
    try_release: Condvar,
}

impl<V: Clone> Pool<V> {
    /// An instance in the initial state, before the constructor sends.
    pub(crate) fn uninit() -> Self {
        Pool {
            lock: Mutex::new(Inner {
                state: 0,
                queue_acquire: 0,
                values: PhantomData,
            }),
            try_acquire: Condvar::new(),
            try_release: Condvar::new(),
        }
    }

    pub fn new() -> Result<Self, ProtocolViolation> {
        let this = Self::uninit();
        this.run_init()?;
        Ok(this)
    }

    /// The constructor sends.
    pub(crate) fn run_init(&self) -> Result<(), ProtocolViolation> {
        self.TOKEN()?;
        self.TOKEN()?;
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
            3 | 6 | 7 | 8 | 11 => self.try_release.notify_all(),
            5 | 9 => self.try_acquire.notify_all(),
            10 => {
                self.try_acquire.notify_all();
                self.try_release.notify_all();
            }
            _ => {}
        }
    }

    pub(crate) fn TOKEN(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => inner.state = 1,
            1 => inner.state = 4,
            2 => {
                inner.state = 5;
                self.try_acquire.notify_all();
            }
            3 => {
                inner.state = 6;
                self.try_release.notify_all();
            }
            5 => {
                inner.state = 9;
                self.try_acquire.notify_all();
            }
            7 => {
                inner.state = 10;
                self.try_acquire.notify_all();
                self.try_release.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("TOKEN", s));
            }
        }
        Ok(())
    }

    pub fn acquire(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_acquire += 1;
        match inner.state {
            0 => inner.state = 2,
            1 => {
                inner.state = 5;
                self.try_acquire.notify_all();
            }
            2 | 5 | 7 | 9 | 10 | 11 => {}
            3 => {
                inner.state = 7;
                self.try_release.notify_all();
            }
            4 => {
                inner.state = 9;
                self.try_acquire.notify_all();
            }
            6 => {
                inner.state = 10;
                self.try_acquire.notify_all();
                self.try_release.notify_all();
            }
            8 => {
                inner.state = 11;
                self.try_release.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("acquire", s));
            }
        }
        loop {
            match inner.state {
                5 => {
                    inner.queue_acquire -= 1;
                    inner.state = if inner.queue_acquire == 0 { 0 } else { 2 };
                    drop(inner);
                    return self.when_TOKEN_acquire();
                }
                9 => {
                    inner.queue_acquire -= 1;
                    inner.state = if inner.queue_acquire == 0 { 1 } else { 5 };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_TOKEN_acquire();
                }
                10 => {
                    inner.queue_acquire -= 1;
                    inner.state = if inner.queue_acquire == 0 { 3 } else { 7 };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_TOKEN_acquire();
                }
                _ => inner = wait(&self.try_acquire, inner),
            }
        }
    }

    pub fn release(&self) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        match inner.state {
            0 => {
                inner.state = 3;
                self.try_release.notify_all();
            }
            1 => {
                inner.state = 6;
                self.try_release.notify_all();
            }
            2 => {
                inner.state = 7;
                self.try_release.notify_all();
            }
            3 => {
                inner.state = 8;
                self.try_release.notify_all();
            }
            5 => {
                inner.state = 10;
                self.try_acquire.notify_all();
                self.try_release.notify_all();
            }
            7 => {
                inner.state = 11;
                self.try_release.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("release", s));
            }
        }
        loop {
            match inner.state {
                3 => {
                    inner.state = 0;
                    drop(inner);
                    return self.when_release();
                }
                6 => {
                    inner.state = 1;
                    drop(inner);
                    return self.when_release();
                }
                7 => {
                    inner.state = 2;
                    drop(inner);
                    return self.when_release();
                }
                8 => {
                    inner.state = 3;
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_release();
                }
                10 => {
                    inner.state = 5;
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_release();
                }
                11 => {
                    inner.state = 7;
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_release();
                }
                _ => inner = wait(&self.try_release, inner),
            }
        }
    }

    fn when_TOKEN_acquire(&self) -> Result<(), ProtocolViolation> {
        Ok(())
    }

    fn when_release(&self) -> Result<(), ProtocolViolation> {
        self.TOKEN()?;
        Ok(())
    }
}
