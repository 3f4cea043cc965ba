use std::any::Any;
use std::fmt;
use std::sync::Arc;

use crate::terms::Term;

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 4 * 1024 * 1024;

/// A value on the host side of the boundary.
///
/// Deeply nested values are fine: clone, comparison and drop do not
/// recurse on the native stack.
pub enum HostValue {
    Int(i128),
    Float(f64),
    Symbol(String),
    Seq(Vec<HostValue>),
    /// Opaque host object. Always crosses as a handle.
    Object(Arc<dyn Any + Send + Sync>),
    Record { name: String, fields: Vec<HostValue> },
    /// A Prolog term held by the host without conversion.
    Term(OpaqueTerm),
}

impl HostValue {
    pub fn symbol(name: impl Into<String>) -> Self {
        HostValue::Symbol(name.into())
    }

    pub fn seq<I: IntoIterator<Item = HostValue>>(items: I) -> Self {
        HostValue::Seq(items.into_iter().collect())
    }

    pub fn record(name: impl Into<String>, fields: Vec<HostValue>) -> Self {
        HostValue::Record {
            name: name.into(),
            fields,
        }
    }

    pub fn object<T: Any + Send + Sync>(value: T) -> Self {
        HostValue::Object(Arc::new(value))
    }

    pub fn is_scalar(&self) -> bool {
        matches!(
            self,
            HostValue::Int(_) | HostValue::Float(_) | HostValue::Symbol(_)
        )
    }

    pub fn as_int(&self) -> Option<i128> {
        match self {
            HostValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            HostValue::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[HostValue]> {
        match self {
            HostValue::Seq(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_opaque(&self) -> Option<&OpaqueTerm> {
        match self {
            HostValue::Term(t) => Some(t),
            _ => None,
        }
    }

    fn children_mut(&mut self) -> Option<&mut Vec<HostValue>> {
        match self {
            HostValue::Seq(v) | HostValue::Record { fields: v, .. } => Some(v),
            _ => None,
        }
    }
}

impl From<i64> for HostValue {
    fn from(i: i64) -> Self {
        HostValue::Int(i.into())
    }
}

impl From<f64> for HostValue {
    fn from(f: f64) -> Self {
        HostValue::Float(f)
    }
}

impl From<&str> for HostValue {
    fn from(s: &str) -> Self {
        HostValue::Symbol(s.to_owned())
    }
}

impl<T: Into<HostValue>> From<Vec<T>> for HostValue {
    fn from(v: Vec<T>) -> Self {
        HostValue::Seq(v.into_iter().map(Into::into).collect())
    }
}

impl Clone for HostValue {
    fn clone(&self) -> Self {
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || match self {
            HostValue::Int(i) => HostValue::Int(*i),
            HostValue::Float(f) => HostValue::Float(*f),
            HostValue::Symbol(s) => HostValue::Symbol(s.clone()),
            HostValue::Seq(v) => HostValue::Seq(v.clone()),
            HostValue::Object(o) => HostValue::Object(o.clone()),
            HostValue::Record { name, fields } => HostValue::Record {
                name: name.clone(),
                fields: fields.clone(),
            },
            HostValue::Term(t) => HostValue::Term(t.clone()),
        })
    }
}

impl PartialEq for HostValue {
    /// Structural, except that objects compare by identity and floats by
    /// bit pattern.
    fn eq(&self, other: &Self) -> bool {
        let mut stack = vec![(self, other)];
        while let Some((a, b)) = stack.pop() {
            let same = match (a, b) {
                (HostValue::Int(x), HostValue::Int(y)) => x == y,
                (HostValue::Float(x), HostValue::Float(y)) => x.to_bits() == y.to_bits(),
                (HostValue::Symbol(x), HostValue::Symbol(y)) => x == y,
                (HostValue::Object(x), HostValue::Object(y)) => Arc::ptr_eq(x, y),
                (HostValue::Term(x), HostValue::Term(y)) => x == y,
                (HostValue::Seq(x), HostValue::Seq(y)) if x.len() == y.len() => {
                    stack.extend(x.iter().zip(y));
                    true
                }
                (
                    HostValue::Record { name: n, fields: x },
                    HostValue::Record { name: m, fields: y },
                ) if n == m && x.len() == y.len() => {
                    stack.extend(x.iter().zip(y));
                    true
                }
                _ => false,
            };
            if !same {
                return false;
            }
        }
        true
    }
}

impl Drop for HostValue {
    fn drop(&mut self) {
        let mut stack = match self.children_mut() {
            Some(v) if !v.is_empty() => std::mem::take(v),
            _ => return,
        };
        while let Some(mut v) = stack.pop() {
            if let Some(children) = v.children_mut() {
                stack.append(children);
            }
        }
    }
}

impl fmt::Debug for HostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || match self {
            HostValue::Int(i) => write!(f, "{i}"),
            HostValue::Float(x) => write!(f, "{x:?}"),
            HostValue::Symbol(s) => write!(f, ":{s}"),
            HostValue::Seq(v) => f.debug_list().entries(v).finish(),
            HostValue::Object(o) => write!(f, "Object({:p})", Arc::as_ptr(o)),
            HostValue::Record { name, fields } => {
                let mut t = f.debug_tuple(name);
                for x in fields {
                    t.field(x);
                }
                t.finish()
            }
            HostValue::Term(t) => write!(f, "{t:?}"),
        })
    }
}

/// A Prolog answer term passed to the host as-is. It can be handed back to
/// later queries on the same engine, or converted on demand with
/// [`OpaqueTerm::materialize`].
#[derive(Clone)]
pub struct OpaqueTerm {
    term: Term,
}

impl OpaqueTerm {
    pub(crate) fn new(term: Term) -> Self {
        OpaqueTerm { term }
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    /// Deep conversion of the referenced term.
    pub fn materialize(&self) -> Result<HostValue, super::ConvertError> {
        super::convert::from_term_deep(&self.term)
    }
}

impl PartialEq for OpaqueTerm {
    /// Identity for compound terms. Atomic terms have no identity beyond
    /// their value.
    fn eq(&self, other: &Self) -> bool {
        match (&self.term, &other.term) {
            (Term::Compound(a), Term::Compound(b)) => Arc::ptr_eq(a, b),
            (a, b) => a == b,
        }
    }
}

impl fmt::Debug for OpaqueTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.term {
            Term::Compound(c) => write!(f, "OpaqueTerm({}/{})", c.functor(), c.arity()),
            t => write!(f, "OpaqueTerm({t})"),
        }
    }
}
