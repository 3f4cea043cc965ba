use std::sync::Arc;

use crate::bridge::HostHandle;

use super::symbol::{atoms, Sym};

/// Index of a cell in a [`VarStore`](super::VarStore).
///
/// Inside a stored clause the same type names a clause-local variable in
/// `0..n_vars`; the machine renames those to fresh store cells on activation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VarId(pub usize);

/// A logic value.
///
/// Compound arguments live behind an `Arc`, so cloning a term is O(1) and
/// ground sub-terms are shared between clause bodies and answers.
#[derive(Clone)]
pub enum Term {
    Atom(Sym),
    Int(i64),
    Float(f64),
    Var(VarId),
    Compound(Arc<Compound>),
    Handle(HostHandle),
}

pub struct Compound {
    functor: Sym,
    has_vars: bool,
    args: Box<[Term]>,
}

impl Compound {
    pub fn functor(&self) -> Sym {
        self.functor
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    /// True when some sub-term is a `Var`, bound or not. Terms without
    /// variables never need renaming or dereferencing.
    pub fn has_vars(&self) -> bool {
        self.has_vars
    }
}

// Lists and right-nested structures can be hundreds of thousands of cells
// deep; the default recursive drop glue would overflow the stack.
impl Drop for Compound {
    fn drop(&mut self) {
        let mut pending: Vec<Arc<Compound>> = Vec::new();
        detach_unique_children(&mut self.args, &mut pending);
        while let Some(mut node) = pending.pop() {
            if let Some(inner) = Arc::get_mut(&mut node) {
                detach_unique_children(&mut inner.args, &mut pending);
            }
        }
    }
}

fn detach_unique_children(args: &mut [Term], pending: &mut Vec<Arc<Compound>>) {
    for arg in args.iter_mut() {
        if let Term::Compound(child) = arg {
            if Arc::strong_count(child) == 1 {
                if let Term::Compound(child) = std::mem::replace(arg, Term::Int(0)) {
                    pending.push(child);
                }
            }
        }
    }
}

/// Key identifying a predicate or the principal functor of a term.
pub type PredKey = (Sym, usize);

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Sym::intern(name))
    }

    pub fn nil() -> Term {
        Term::Atom(atoms::NIL)
    }

    /// Builds `functor(args...)`; an empty argument list yields the atom.
    pub fn compound(functor: Sym, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return Term::Atom(functor);
        }
        let has_vars = args.iter().any(Term::has_vars);
        Term::Compound(Arc::new(Compound {
            functor,
            has_vars,
            args: args.into_boxed_slice(),
        }))
    }

    pub fn from_name(name: &str, args: Vec<Term>) -> Term {
        Term::compound(Sym::intern(name), args)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(atoms::DOT, vec![head, tail])
    }

    /// Builds a proper list from `items`.
    pub fn list<I>(items: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn list_with_tail<I>(items: I, tail: Term) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Int(_) | Term::Float(_))
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Term::Atom(_) | Term::Compound(_))
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Compound(c) => c.has_vars,
            _ => false,
        }
    }

    /// Name and arity for atoms and compounds.
    pub fn principal(&self) -> Option<PredKey> {
        match self {
            Term::Atom(s) => Some((*s, 0)),
            Term::Compound(c) => Some((c.functor, c.arity())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(c) => c.args(),
            _ => &[],
        }
    }

    /// Splits a `'.'/2` cell into head and tail.
    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Compound(c) if c.functor == atoms::DOT && c.arity() == 2 => {
                Some((&c.args[0], &c.args[1]))
            }
            _ => None,
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Atom(s) if *s == atoms::NIL)
    }

    /// Structural check, without dereferencing variables.
    pub fn is_list(&self) -> bool {
        self.list_items().is_some()
    }

    /// Elements of a proper list, without dereferencing variables.
    pub fn list_items(&self) -> Option<Vec<&Term>> {
        let mut items = Vec::new();
        let mut cur = self;
        loop {
            if cur.is_nil() {
                return Some(items);
            }
            let (head, tail) = cur.as_cons()?;
            items.push(head);
            cur = tail;
        }
    }

    /// Number of nodes, counting every atomic leaf and compound once.
    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            count += 1;
            stack.extend(t.args());
        }
        count
    }
}

impl From<i64> for Term {
    fn from(v: i64) -> Term {
        Term::Int(v)
    }
}

impl From<f64> for Term {
    fn from(v: f64) -> Term {
        Term::Float(v)
    }
}

impl From<Sym> for Term {
    fn from(s: Sym) -> Term {
        Term::Atom(s)
    }
}

/// Structural identity: same shape, same atoms, bit-identical floats,
/// same variable cells and same handle slots.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        let mut stack: Vec<(&Term, &Term)> = Vec::new();
        let (mut a, mut b) = (self, other);
        loop {
            let same = match (a, b) {
                (Term::Atom(x), Term::Atom(y)) => x == y,
                (Term::Int(x), Term::Int(y)) => x == y,
                (Term::Float(x), Term::Float(y)) => x.to_bits() == y.to_bits(),
                (Term::Var(x), Term::Var(y)) => x == y,
                (Term::Handle(x), Term::Handle(y)) => x == y,
                (Term::Compound(x), Term::Compound(y)) => {
                    if !Arc::ptr_eq(x, y) {
                        if x.functor != y.functor || x.arity() != y.arity() {
                            return false;
                        }
                        stack.extend(x.args.iter().zip(y.args.iter()));
                    }
                    true
                }
                _ => false,
            };
            if !same {
                return false;
            }
            match stack.pop() {
                Some((x, y)) => {
                    a = x;
                    b = y;
                }
                None => return true,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compound_without_args_is_atom() {
        assert!(matches!(Term::from_name("foo", vec![]), Term::Atom(_)));
    }

    #[test]
    fn list_encoding() {
        let l = Term::list(vec![Term::Int(1), Term::Int(2)]);
        let expected = Term::cons(Term::Int(1), Term::cons(Term::Int(2), Term::nil()));
        assert_eq!(l, expected);
        assert!(l.is_list());
        assert_eq!(l.list_items().unwrap().len(), 2);
        assert!(!Term::cons(Term::Int(1), Term::Var(VarId(0))).is_list());
    }

    #[test]
    fn has_vars_propagates() {
        let ground = Term::from_name("f", vec![Term::atom("a"), Term::Int(1)]);
        assert!(!ground.has_vars());
        let open = Term::from_name("g", vec![ground, Term::list(vec![Term::Var(VarId(3))])]);
        assert!(open.has_vars());
    }

    #[test]
    fn floats_compare_bitwise() {
        assert_eq!(Term::Float(1.5), Term::Float(1.5));
        assert_ne!(Term::Float(0.0), Term::Float(-0.0));
        assert_ne!(Term::Float(1.0), Term::Int(1));
    }

    #[test]
    fn dropping_a_deep_list_does_not_overflow() {
        let long = Term::list((0..1_000_000).map(Term::Int));
        assert_eq!(long.size(), 2_000_001);
        drop(long);
        let mut nested = Term::nil();
        for i in 0..500_000 {
            nested = Term::from_name("s", vec![Term::Int(i), nested]);
        }
        assert!(nested.size() > 500_000);
    }

    #[test]
    fn deep_equality_is_iterative() {
        let a = Term::list((0..300_000).map(Term::Int));
        let b = Term::list((0..300_000).map(Term::Int));
        assert_eq!(a, b);
    }
}
