//! Adapters that let simulator scripts drive the generated objects through
//! their crate-private state methods.

use tsop_core::sim::{Target, Violation};
use tsop_core::value::Value;

trait IntoValue {
    fn into_value(self) -> Value;
}

impl IntoValue for Value {
    fn into_value(self) -> Value {
        self
    }
}

impl IntoValue for () {
    fn into_value(self) -> Value {
        Value::Unit
    }
}

macro_rules! target {
    (
        $module:ident::$object:ident,
        states { $($state:ident($($sa:ident),*)),* $(,)? },
        operations { $($op:ident($($oa:ident),*)),* $(,)? } $(,)?
    ) => {
        impl Target for crate::$module::$object<Value> {
            fn init(&self) -> Result<(), Violation> {
                self.run_init().map_err(|v| Violation { tag: v.tag.to_owned(), state: v.state })
            }

            #[allow(unused_variables, unused_mut)]
            fn send(&self, tag: &str, args: Vec<Value>) -> Result<(), Violation> {
                let mut args = args.into_iter();
                let result = match tag {
                    $(stringify!($state) => {
                        $(let $sa = args.next().expect("checked arity");)*
                        self.$state($($sa),*)
                    })*
                    other => panic!("`{other}` is not a state of {}", stringify!($object)),
                };
                result.map_err(|v| Violation { tag: v.tag.to_owned(), state: v.state })
            }

            #[allow(unused_variables, unused_mut)]
            fn call(&self, tag: &str, args: Vec<Value>) -> Result<Value, Violation> {
                let mut args = args.into_iter();
                match tag {
                    $(stringify!($op) => {
                        $(let $oa = args.next().expect("checked arity");)*
                        self.$op($($oa),*)
                            .map(IntoValue::into_value)
                            .map_err(|v| Violation { tag: v.tag.to_owned(), state: v.state })
                    })*
                    other => panic!("`{other}` is not an operation of {}", stringify!($object)),
                }
            }

            fn state(&self) -> usize {
                self.current_state()
            }
        }

        impl crate::$module::$object<Value> {
            /// An instance before its constructor sends, as scripts expect.
            pub fn for_script() -> Self {
                Self::uninit()
            }
        }
    };
}

target!(future::Future, states { EMPTY(), FULL(x) }, operations { get(), put(x) });
target!(lock::Lock, states { LOCKED(), UNLOCKED() }, operations { acquire(), release() });
target!(bag::Bag, states { ITEM(x) }, operations { add(x), take() });
target!(cell::Cell, states { VALUE(v, version) }, operations { read(), write(v, version) });
target!(pool::Pool, states { TOKEN() }, operations { acquire(), release() });
