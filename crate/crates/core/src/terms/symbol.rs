use std::collections::HashMap;
use std::fmt;

use once_cell::sync::Lazy;
use parking_lot::RwLock;

/// Interned atom or functor name.
///
/// The intern table is process-wide, so ids are stable for the lifetime of
/// every engine in the process and symbols can be compared, hashed and
/// printed without a reference to any particular engine.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u32);

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, Sym>,
}

impl Interner {
    fn insert(&mut self, name: &str) -> Sym {
        if let Some(&sym) = self.ids.get(name) {
            return sym;
        }
        let sym = Sym(u32::try_from(self.names.len()).expect("symbol table overflow"));
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        self.names.push(leaked);
        self.ids.insert(leaked, sym);
        sym
    }
}

static INTERNER: Lazy<RwLock<Interner>> = Lazy::new(|| {
    let mut interner = Interner {
        names: Vec::with_capacity(256),
        ids: HashMap::with_capacity(256),
    };
    for name in RESERVED {
        interner.insert(name);
    }
    RwLock::new(interner)
});

// Order must match the constants in `atoms`.
const RESERVED: [&str; 22] = [
    "[]", ".", "{}", ",", "true", "fail", "!", ";", "->", ":-", "-", "+", "call", "=", "\\+",
    "false", "nil", "done", "s", "t", "f", "|",
];

/// Symbols pre-interned at start-up so builtin dispatch can compare ids.
pub mod atoms {
    use super::Sym;

    pub const NIL: Sym = Sym(0);
    pub const DOT: Sym = Sym(1);
    pub const CURLY: Sym = Sym(2);
    pub const COMMA: Sym = Sym(3);
    pub const TRUE: Sym = Sym(4);
    pub const FAIL: Sym = Sym(5);
    pub const CUT: Sym = Sym(6);
    pub const SEMICOLON: Sym = Sym(7);
    pub const ARROW: Sym = Sym(8);
    pub const NECK: Sym = Sym(9);
    pub const MINUS: Sym = Sym(10);
    pub const PLUS: Sym = Sym(11);
    pub const CALL: Sym = Sym(12);
    pub const EQUALS: Sym = Sym(13);
    pub const NOT_PROVABLE: Sym = Sym(14);
    pub const FALSE: Sym = Sym(15);
    pub const BAR: Sym = Sym(21);
}

impl Sym {
    /// Returns the id for `name`, allocating a fresh one the first time the
    /// name is seen.
    pub fn intern(name: &str) -> Sym {
        if let Some(&sym) = INTERNER.read().ids.get(name) {
            return sym;
        }
        INTERNER.write().insert(name)
    }

    pub fn name(self) -> &'static str {
        INTERNER.read().names[self.0 as usize]
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Free-function form of [`Sym::intern`].
pub fn intern(name: &str) -> Sym {
    Sym::intern(name)
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.name())
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intern_is_idempotent() {
        assert_eq!(intern("append"), intern("append"));
    }

    #[test]
    fn intern_is_injective() {
        assert_ne!(intern("a"), intern("b"));
    }

    #[test]
    fn reserved_atoms_have_fixed_ids() {
        assert_eq!(intern("[]"), atoms::NIL);
        assert_eq!(intern("."), atoms::DOT);
        assert_eq!(intern("{}"), atoms::CURLY);
        assert_eq!(intern(","), atoms::COMMA);
        assert_eq!(intern("true"), atoms::TRUE);
        assert_eq!(intern("fail"), atoms::FAIL);
        assert_eq!(intern("!"), atoms::CUT);
        assert_eq!(intern(";"), atoms::SEMICOLON);
        assert_eq!(intern("->"), atoms::ARROW);
        assert_eq!(intern("\\+"), atoms::NOT_PROVABLE);
        assert_eq!(intern("false"), atoms::FALSE);
        assert_eq!(intern("|"), atoms::BAR);
    }

    #[test]
    fn name_round_trips() {
        for name in ["foo", "hello world", "[]", "", "ünïcödé", "+-*"] {
            assert_eq!(intern(name).name(), name);
        }
    }
}
