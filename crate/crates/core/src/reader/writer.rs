use std::borrow::Cow;
use std::fmt;

use crate::terms::{atoms, Bindings, Term};

use super::lexer::{is_alnum, is_symbol_char};
use super::ops::{OpDef, OperatorTable};

/// Formats `t` so that reading the text back yields the same term (up to
/// variable renaming). Unbound variables print as `_G<cell>`.
pub fn format_term(t: &Term, ops: &OperatorTable) -> String {
    let mut w = Writer {
        out: String::new(),
        ops,
        bindings: None,
    };
    w.write(t, 1200);
    w.out
}

/// Like [`format_term`], dereferencing variables through `bindings`.
pub fn format_term_in(bindings: &Bindings, t: &Term, ops: &OperatorTable) -> String {
    let mut w = Writer {
        out: String::new(),
        ops,
        bindings: Some(bindings),
    };
    w.write(t, 1200);
    w.out
}

/// Formats a clause term followed by the end token.
pub fn format_clause(t: &Term, ops: &OperatorTable) -> String {
    let mut text = format_term(t, ops);
    if text.ends_with(is_symbol_char) {
        text.push(' ');
    }
    text.push('.');
    text
}

/// Atom text with quotes where the bare name would not read back as the
/// same atom.
pub fn quote_atom(name: &str) -> Cow<'_, str> {
    if atom_is_bare(name) {
        return Cow::Borrowed(name);
    }
    let mut out = String::with_capacity(name.len() + 2);
    out.push('\'');
    for c in name.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\x{:x}\\", c as u32)),
            c => out.push(c),
        }
    }
    out.push('\'');
    Cow::Owned(out)
}

fn atom_is_bare(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if matches!(name, "[]" | "{}" | "!" | ";") {
        return true;
    }
    if first.is_lowercase() {
        return chars.all(is_alnum);
    }
    name.chars().all(is_symbol_char) && name != "." && !name.starts_with("/*")
}

pub(crate) fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{v:?}");
    match s.find('e') {
        Some(e) if !s[..e].contains('.') => format!("{}.0{}", &s[..e], &s[e..]),
        _ => s,
    }
}

enum Form {
    Infix(OpDef),
    Prefix(OpDef),
    Postfix(OpDef),
    List,
    Curly,
    Canonical,
}

struct Writer<'a> {
    out: String,
    ops: &'a OperatorTable,
    bindings: Option<&'a Bindings>,
}

impl<'a> Writer<'a> {
    /// Appends a lexeme, separating it from the previous one when the two
    /// would otherwise fuse into a single token.
    fn emit(&mut self, s: &str) {
        if let (Some(prev), Some(next)) = (self.out.chars().next_back(), s.chars().next()) {
            let fuse = (is_symbol_char(prev) && is_symbol_char(next))
                || (is_alnum(prev) && is_alnum(next))
                || (prev == '\'' && next == '\'')
                || (prev == ',' && next == ',');
            if fuse {
                self.out.push(' ');
            }
        }
        self.out.push_str(s);
    }

    fn deref<'t>(&self, t: &'t Term) -> &'t Term
    where
        'a: 't,
    {
        match self.bindings {
            Some(b) => b.deref(t).unwrap_or(t),
            None => t,
        }
    }

    fn form(&self, t: &Term) -> Form {
        let Term::Compound(c) = t else {
            return Form::Canonical;
        };
        let name = c.functor().name();
        match c.arity() {
            2 if c.functor() == atoms::DOT => Form::List,
            1 if c.functor() == atoms::CURLY => Form::Curly,
            2 => self.ops.infix(name).map_or(Form::Canonical, Form::Infix),
            1 => {
                if let Some(def) = self.ops.prefix(name) {
                    if self.prefix_operand_is_plain(name, &c.args()[0], def) {
                        return Form::Prefix(def);
                    }
                    return Form::Canonical;
                }
                self.ops.postfix(name).map_or(Form::Canonical, Form::Postfix)
            }
            _ => Form::Canonical,
        }
    }

    // Operands that would read differently after a prefix operator
    // (`-(1)` versus `-1`, operator atoms, anything needing brackets) force
    // the canonical `op(arg)` form.
    fn prefix_operand_is_plain(&self, name: &str, arg: &Term, def: OpDef) -> bool {
        let arg = self.deref(arg);
        match arg {
            Term::Int(_) | Term::Float(_) => name != "-" && name != "+",
            Term::Atom(s) => !self.ops.is_op(s.name()) && *s != atoms::COMMA && *s != atoms::BAR,
            _ => self.priority(arg) <= def.right_max(),
        }
    }

    fn priority(&self, t: &Term) -> u16 {
        match self.form(t) {
            Form::Infix(d) | Form::Prefix(d) | Form::Postfix(d) => d.priority,
            _ => 0,
        }
    }

    fn write(&mut self, t: &Term, max: u16) {
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.write_inner(t, max));
    }

    fn write_inner(&mut self, t: &Term, max: u16) {
        let t = self.deref(t);
        match t {
            Term::Var(v) => self.emit(&format!("_G{}", v.0)),
            Term::Int(i) => self.emit(&i.to_string()),
            Term::Float(f) => self.emit(&format_float(*f)),
            Term::Handle(h) => self.emit(&format!("'$handle'({})", h.slot())),
            Term::Atom(s) => {
                let name = s.name();
                if *s == atoms::COMMA || *s == atoms::BAR {
                    self.emit(&format!("'{name}'"));
                } else {
                    self.emit(&quote_atom(name));
                }
            }
            Term::Compound(c) => match self.form(t) {
                Form::List => self.write_list(t),
                Form::Curly => {
                    self.emit("{");
                    self.write(&c.args()[0], 1200);
                    self.emit("}");
                }
                Form::Infix(def) => {
                    let open = def.priority > max;
                    if open {
                        self.emit("(");
                    }
                    self.write_left_operand(&c.args()[0], def);
                    self.emit_op(c.functor().name());
                    self.write_operand(&c.args()[1], def.right_max());
                    if open {
                        self.emit(")");
                    }
                }
                Form::Prefix(def) => {
                    let open = def.priority > max;
                    if open {
                        self.emit("(");
                    }
                    self.emit_op(c.functor().name());
                    // `op (` must not read back as the call `op(`.
                    self.out.push(' ');
                    self.write_operand(&c.args()[0], def.right_max());
                    if open {
                        self.emit(")");
                    }
                }
                Form::Postfix(def) => {
                    let open = def.priority > max;
                    if open {
                        self.emit("(");
                    }
                    self.write_left_operand(&c.args()[0], def);
                    self.emit_op(c.functor().name());
                    if open {
                        self.emit(")");
                    }
                }
                Form::Canonical => {
                    let name = c.functor().name();
                    match name {
                        "[]" | "{}" => self.emit(&format!("'{name}'")),
                        "," | "|" => self.emit(&format!("'{name}'")),
                        _ => self.emit(&quote_atom(name)),
                    }
                    self.out.push('(');
                    for (i, arg) in c.args().iter().enumerate() {
                        if i > 0 {
                            self.out.push(',');
                        }
                        self.write(arg, 999);
                    }
                    self.out.push(')');
                }
            },
        }
    }

    fn emit_op(&mut self, name: &str) {
        if name == "," {
            self.out.push(',');
        } else {
            self.emit(name);
        }
    }

    fn write_left_operand(&mut self, t: &Term, def: OpDef) {
        let t = self.deref(t);
        // A prefix-operator term on the left would absorb this operator if
        // its argument limit reaches our priority.
        if let Form::Prefix(p) = self.form(t) {
            if p.right_max() >= def.priority {
                self.emit("(");
                self.write(t, 1200);
                self.emit(")");
                return;
            }
        }
        self.write_operand(t, def.left_max());
    }

    fn write_operand(&mut self, t: &Term, max: u16) {
        let t = self.deref(t);
        if let Term::Atom(s) = t {
            if self.ops.is_op(s.name()) {
                self.emit("(");
                self.emit(&quote_atom(s.name()));
                self.emit(")");
                return;
            }
        }
        self.write(t, max);
    }

    fn write_list(&mut self, t: &Term) {
        self.emit("[");
        let mut cur = t;
        let mut first = true;
        loop {
            let (head, tail) = cur.as_cons().expect("list form");
            if !first {
                self.out.push(',');
            }
            first = false;
            self.write(head, 999);
            let tail = self.deref(tail);
            if tail.is_nil() {
                break;
            }
            if tail.as_cons().is_some() {
                cur = tail;
                continue;
            }
            self.out.push('|');
            self.write(tail, 999);
            break;
        }
        self.out.push(']');
    }
}

/// Prints with the standard operator table.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_term(self, OperatorTable::standard()))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_term(self, OperatorTable::standard()))
    }
}
