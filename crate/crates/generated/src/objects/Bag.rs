// @generated by tsop from object spec sha256:c2641819a6a2ca5d428c2356dec4e3aac0fe7b5ad290c62d5b6d4496eb9f5bb9
// Do not edit; regenerate with `tsop generate`.
//
// object Bag
// protocol *ITEM . *add . *take
// states over (ITEM, add, take):
//   #0 000
//   #1 $00
//   #2 0$0
//   #3 00$
//   #4 $$0
//   #5 $0$
//   #6 0$$
//   #7 $$$

#![allow(
    non_snake_case,
    non_camel_case_types,
    dead_code,
    unused_variables,
    clippy::all
)]

use std::collections::VecDeque;
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
            "protocol violation on Bag: `{}` received in state #{} ({})",
            self.tag, self.state, self.counters
        )
    }
}

impl std::error::Error for ProtocolViolation {}

fn wait<'a, T>(cv: &Condvar, guard: MutexGuard<'a, T>) -> MutexGuard<'a, T> {
    cv.wait(guard).unwrap_or_else(PoisonError::into_inner)
}

const LABELS: [&str; 8] = ["000", "$00", "0$0", "00$", "$$0", "$0$", "0$$", "$$$"];

struct Inner<V> {
    state: usize,
    queue_ITEM: VecDeque<V>,
    queue_add: VecDeque<V>,
    queue_take: usize,
    values: PhantomData<fn() -> V>,
}

pub struct Bag<V> {
    lock: Mutex<Inner<V>>,
    try_add: Condvar,
    try_take: Condvar,
}

impl<V: Clone> Bag<V> {
    /// An instance in the initial state, before the constructor sends.
    pub(crate) fn uninit() -> Self {
        Bag {
            lock: Mutex::new(Inner {
                state: 0,
                queue_ITEM: VecDeque::new(),
                queue_add: VecDeque::new(),
                queue_take: 0,
                values: PhantomData,
            }),
            try_add: Condvar::new(),
            try_take: Condvar::new(),
        }
    }

    pub fn new() -> Result<Self, ProtocolViolation> {
        let this = Self::uninit();
        this.run_init()?;
        Ok(this)
    }

    /// The constructor sends.
    pub(crate) fn run_init(&self) -> Result<(), ProtocolViolation> {
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
            2 | 4 | 6 => self.try_add.notify_all(),
            5 => self.try_take.notify_all(),
            7 => {
                self.try_add.notify_all();
                self.try_take.notify_all();
            }
            _ => {}
        }
    }

    pub(crate) fn ITEM(&self, x: V) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_ITEM.push_back(x);
        match inner.state {
            0 => inner.state = 1,
            1 | 4 | 5 | 7 => {}
            2 => {
                inner.state = 4;
                self.try_add.notify_all();
            }
            3 => {
                inner.state = 5;
                self.try_take.notify_all();
            }
            6 => {
                inner.state = 7;
                self.try_add.notify_all();
                self.try_take.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("ITEM", s));
            }
        }
        Ok(())
    }

    pub fn add(&self, x: V) -> Result<(), ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_add.push_back(x);
        match inner.state {
            0 => {
                inner.state = 2;
                self.try_add.notify_all();
            }
            1 => {
                inner.state = 4;
                self.try_add.notify_all();
            }
            2 | 4 | 6 | 7 => {}
            3 => {
                inner.state = 6;
                self.try_add.notify_all();
            }
            5 => {
                inner.state = 7;
                self.try_add.notify_all();
                self.try_take.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("add", s));
            }
        }
        loop {
            match inner.state {
                2 => {
                    let x = inner.queue_add.pop_front().expect("add pending");
                    inner.state = if inner.queue_add.is_empty() { 0 } else { 2 };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_add(x);
                }
                4 => {
                    let x = inner.queue_add.pop_front().expect("add pending");
                    inner.state = if inner.queue_add.is_empty() { 1 } else { 4 };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_add(x);
                }
                6 => {
                    let x = inner.queue_add.pop_front().expect("add pending");
                    inner.state = if inner.queue_add.is_empty() { 3 } else { 6 };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_add(x);
                }
                7 => {
                    let x = inner.queue_add.pop_front().expect("add pending");
                    inner.state = if inner.queue_add.is_empty() { 5 } else { 7 };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_add(x);
                }
                _ => inner = wait(&self.try_add, inner),
            }
        }
    }

    pub fn take(&self) -> Result<V, ProtocolViolation> {
        let mut inner = self.lock();
        inner.queue_take += 1;
        match inner.state {
            0 => inner.state = 3,
            1 => {
                inner.state = 5;
                self.try_take.notify_all();
            }
            2 => {
                inner.state = 6;
                self.try_add.notify_all();
            }
            3 | 5 | 6 | 7 => {}
            4 => {
                inner.state = 7;
                self.try_add.notify_all();
                self.try_take.notify_all();
            }
            s => {
                drop(inner);
                return Err(Self::violation("take", s));
            }
        }
        loop {
            match inner.state {
                5 => {
                    inner.queue_take -= 1;
                    let x = inner.queue_ITEM.pop_front().expect("ITEM pending");
                    inner.state = match (inner.queue_ITEM.is_empty(), inner.queue_take == 0) {
                        (false, false) => 5,
                        (false, true) => 1,
                        (true, false) => 3,
                        (true, true) => 0,
                    };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_ITEM_take(x);
                }
                7 => {
                    inner.queue_take -= 1;
                    let x = inner.queue_ITEM.pop_front().expect("ITEM pending");
                    inner.state = match (inner.queue_ITEM.is_empty(), inner.queue_take == 0) {
                        (false, false) => 7,
                        (false, true) => 4,
                        (true, false) => 6,
                        (true, true) => 2,
                    };
                    self.wake(inner.state);
                    drop(inner);
                    return self.when_ITEM_take(x);
                }
                _ => inner = wait(&self.try_take, inner),
            }
        }
    }

    fn when_add(&self, x: V) -> Result<(), ProtocolViolation> {
        self.ITEM(x)?;
        Ok(())
    }

    fn when_ITEM_take(&self, x: V) -> Result<V, ProtocolViolation> {
        Ok(x)
    }
}
