use rustc_hash::FxHashMap as HashMap;

use once_cell::sync::Lazy;

use crate::terms::{PredKey, Sym};

/// Predicates the machine implements natively, including control constructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Builtin {
    True,
    Fail,
    Cut,
    Conj,
    Disj,
    IfThen,
    Not,
    Call(usize),
    Unify,
    NotUnify,
    Identical,
    NotIdentical,
    Is,
    Compare(ArithCmp),
    Var,
    Nonvar,
    Atom,
    Integer,
    Float,
    Number,
    Atomic,
    Compound,
    Callable,
    Functor,
    Arg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ArithCmp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

/// Highest `call/N` arity supported.
pub const MAX_CALL_ARITY: usize = 8;

static TABLE: Lazy<HashMap<PredKey, Builtin>> = Lazy::new(|| {
    use Builtin::*;
    let mut m = HashMap::default();
    let mut add = |name: &str, arity: usize, b: Builtin| {
        m.insert((Sym::intern(name), arity), b);
    };
    add("true", 0, True);
    add("fail", 0, Fail);
    add("false", 0, Fail);
    add("!", 0, Cut);
    add(",", 2, Conj);
    add(";", 2, Disj);
    add("->", 2, IfThen);
    add("\\+", 1, Not);
    for n in 1..=MAX_CALL_ARITY {
        add("call", n, Call(n - 1));
    }
    add("=", 2, Unify);
    add("\\=", 2, NotUnify);
    add("==", 2, Identical);
    add("\\==", 2, NotIdentical);
    add("is", 2, Is);
    add("<", 2, Compare(ArithCmp::Lt));
    add(">", 2, Compare(ArithCmp::Gt));
    add("=<", 2, Compare(ArithCmp::Le));
    add(">=", 2, Compare(ArithCmp::Ge));
    add("=:=", 2, Compare(ArithCmp::Eq));
    add("=\\=", 2, Compare(ArithCmp::Ne));
    add("var", 1, Var);
    add("nonvar", 1, Nonvar);
    add("atom", 1, Atom);
    add("integer", 1, Integer);
    add("float", 1, Float);
    add("number", 1, Number);
    add("atomic", 1, Atomic);
    add("compound", 1, Compound);
    add("callable", 1, Callable);
    add("functor", 3, Functor);
    add("arg", 3, Arg);
    m
});

pub(crate) fn lookup(key: PredKey) -> Option<Builtin> {
    TABLE.get(&key).copied()
}

/// True if `key` names a builtin or control construct, which user programs
/// may not define.
pub fn is_builtin(key: PredKey) -> bool {
    TABLE.contains_key(&key)
}
