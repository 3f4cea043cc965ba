use thiserror::Error;

use crate::terms::{atoms, Sym, Term};

use super::registry::HandleRegistry;
use super::value::{HostValue, OpaqueTerm};

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 4 * 1024 * 1024;

/// How composite values cross the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConversionPolicy {
    /// Structural translation in both directions on every crossing.
    #[default]
    Deep,
    /// Composites cross as handles (inbound) or opaque term references
    /// (outbound). Integers, floats and symbols are still materialized.
    NoConversion,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("answer is not ground: {0}")]
    NonGround(String),
    #[error("unsupported host value: {0}")]
    Unsupported(&'static str),
    #[error("integer {0} does not fit in 64 bits")]
    IntRange(i128),
}

/// Converts a host value to a term under `policy`. Handles are registered
/// in `registry`.
pub fn to_term(
    registry: &HandleRegistry,
    v: &HostValue,
    policy: ConversionPolicy,
) -> Result<Term, ConvertError> {
    match (v, policy) {
        (HostValue::Int(i), _) => i64::try_from(*i)
            .map(Term::Int)
            .map_err(|_| ConvertError::IntRange(*i)),
        (HostValue::Float(f), _) => Ok(Term::Float(*f)),
        (HostValue::Symbol(s), _) if s.is_empty() => Err(ConvertError::Unsupported("empty symbol")),
        (HostValue::Symbol(s), _) => Ok(Term::Atom(Sym::intern(s))),
        (HostValue::Term(t), _) => Ok(t.term().clone()),
        (HostValue::Object(_), _) => Ok(Term::Handle(registry.register(v.clone()))),
        (HostValue::Record { fields, .. }, _) if fields.is_empty() => {
            Err(ConvertError::Unsupported("record without fields"))
        }
        (_, ConversionPolicy::NoConversion) => Ok(Term::Handle(registry.register(v.clone()))),
        (HostValue::Seq(items), ConversionPolicy::Deep) => {
            let items = items
                .iter()
                .map(|x| stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || to_term(registry, x, policy)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::list(items))
        }
        (HostValue::Record { name, fields }, ConversionPolicy::Deep) => {
            if name.is_empty() {
                return Err(ConvertError::Unsupported("record with empty name"));
            }
            let args = fields
                .iter()
                .map(|x| stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || to_term(registry, x, policy)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::compound(Sym::intern(name), args))
        }
    }
}

/// Converts a fully resolved answer term to a host value under `policy`.
/// Answers must be ground under either policy.
pub fn from_term(t: &Term, policy: ConversionPolicy) -> Result<HostValue, ConvertError> {
    match policy {
        ConversionPolicy::Deep => from_term_deep(t),
        ConversionPolicy::NoConversion => match t {
            Term::Compound(c) if c.has_vars() => Err(ConvertError::NonGround(t.to_string())),
            Term::Compound(_) => Ok(HostValue::Term(OpaqueTerm::new(t.clone()))),
            scalar => from_term_deep(scalar),
        },
    }
}

pub(crate) fn from_term_deep(t: &Term) -> Result<HostValue, ConvertError> {
    if t.has_vars() {
        return Err(ConvertError::NonGround(t.to_string()));
    }
    Ok(ground_to_host(t))
}

fn ground_to_host(t: &Term) -> HostValue {
    match t {
        Term::Int(i) => HostValue::Int(*i as i128),
        Term::Float(f) => HostValue::Float(*f),
        Term::Atom(s) if *s == atoms::NIL => HostValue::Seq(Vec::new()),
        Term::Atom(s) => HostValue::Symbol(s.name().to_owned()),
        Term::Handle(h) => h.value().clone(),
        Term::Var(_) => unreachable!("ground term contains a variable"),
        Term::Compound(c) => {
            if let Some(items) = t.list_items() {
                return HostValue::Seq(
                    items
                        .into_iter()
                        .map(|x| stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || ground_to_host(x)))
                        .collect(),
                );
            }
            let fields = c
                .args()
                .iter()
                .map(|x| stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || ground_to_host(x)))
                .collect();
            HostValue::Record {
                name: c.functor().name().to_owned(),
                fields,
            }
        }
    }
}
