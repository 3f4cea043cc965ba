use std::collections::HashMap;

use once_cell::sync::Lazy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpType {
    Xfx,
    Xfy,
    Yfx,
    Fy,
    Fx,
    Xf,
    Yf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixity {
    Prefix,
    Infix,
    Postfix,
}

impl OpType {
    pub fn fixity(self) -> Fixity {
        match self {
            OpType::Xfx | OpType::Xfy | OpType::Yfx => Fixity::Infix,
            OpType::Fy | OpType::Fx => Fixity::Prefix,
            OpType::Xf | OpType::Yf => Fixity::Postfix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpDef {
    pub priority: u16,
    pub kind: OpType,
}

impl OpDef {
    /// Maximum priority of the left operand (infix and postfix).
    pub fn left_max(self) -> u16 {
        match self.kind {
            OpType::Yfx | OpType::Yf => self.priority,
            _ => self.priority - 1,
        }
    }

    /// Maximum priority of the right operand (infix and prefix).
    pub fn right_max(self) -> u16 {
        match self.kind {
            OpType::Xfy | OpType::Fy => self.priority,
            _ => self.priority - 1,
        }
    }
}

/// Fixed operator table keyed by (name, fixity).
#[derive(Debug, Clone, Default)]
pub struct OperatorTable {
    entries: HashMap<String, [Option<OpDef>; 3]>,
}

fn slot(fixity: Fixity) -> usize {
    match fixity {
        Fixity::Prefix => 0,
        Fixity::Infix => 1,
        Fixity::Postfix => 2,
    }
}

static DEFAULT: Lazy<OperatorTable> = Lazy::new(|| {
    use OpType::*;
    let mut t = OperatorTable::empty();
    for (p, kind, names) in [
        (1200, Xfx, &[":-", "-->"][..]),
        (1200, Fx, &[":-", "?-"][..]),
        (1100, Xfy, &[";"][..]),
        (1050, Xfy, &["->"][..]),
        (1000, Xfy, &[","][..]),
        (900, Fy, &["\\+"][..]),
        (
            700,
            Xfx,
            &[
                "=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=", "=..", "is", "<", ">", "=<",
                ">=", "=:=", "=\\=",
            ][..],
        ),
        (500, Yfx, &["+", "-", "/\\", "\\/"][..]),
        (400, Yfx, &["*", "/", "//", "mod", "rem", "<<", ">>"][..]),
        (200, Xfx, &["**"][..]),
        (200, Xfy, &["^"][..]),
        (200, Fy, &["-", "+", "\\"][..]),
    ] {
        for name in names {
            t.add(name, p, kind);
        }
    }
    t
});

impl OperatorTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The standard table used for consulting and printing.
    pub fn standard() -> &'static OperatorTable {
        &DEFAULT
    }

    pub fn add(&mut self, name: &str, priority: u16, kind: OpType) {
        assert!((1..=1200).contains(&priority), "operator priority out of range");
        self.entries.entry(name.to_owned()).or_default()[slot(kind.fixity())] =
            Some(OpDef { priority, kind });
    }

    pub fn get(&self, name: &str, fixity: Fixity) -> Option<OpDef> {
        self.entries.get(name).and_then(|slots| slots[slot(fixity)])
    }

    pub fn prefix(&self, name: &str) -> Option<OpDef> {
        self.get(name, Fixity::Prefix)
    }

    pub fn infix(&self, name: &str) -> Option<OpDef> {
        self.get(name, Fixity::Infix)
    }

    pub fn postfix(&self, name: &str) -> Option<OpDef> {
        self.get(name, Fixity::Postfix)
    }

    pub fn is_op(&self, name: &str) -> bool {
        self.entries
            .get(name)
            .is_some_and(|slots| slots.iter().any(Option::is_some))
    }
}
