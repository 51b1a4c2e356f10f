//! Problem-file and expression parsing, and report serialization.
//!
//! Grammar (EBNF, also documented in the README):
//!
//! ```text
//! problem    = { statement } ;
//! statement  = chart-stmt | module-stmt | task-stmt ;
//! chart-stmt = "chart" "{" "free" "=" INT "," "log" "=" INT
//!              [ "," "idealized" "=" intset ] "}" ;
//! intset     = "{" [ INT { "," INT } ] "}" ;
//! module-stmt= "module" NAME "{" "side" "=" ("left"|"right") ";"
//!              "rank" "=" INT ";" { "row" expr { "," expr } ";" } "}" ;
//! task-stmt  = "task" NAME { NAME "=" value } ";" ;
//! value      = INT | NAME | intset | "[" [ cexpr { "," cexpr } ] "]" ;
//! expr       = term { ("+"|"-") term } ;
//! term       = factor { "*" factor } ;
//! factor     = [ "-" ] atom ;
//! atom       = INT [ "/" INT ] | GEN [ "^" INT ] | "(" expr ")" ;
//! GEN        = "x"i | "t"i | "d"i | "th"i          (operators)
//!            | "x"i | "t"i | "xi"i | "tau"i        (commutative cexpr)
//! ```
//!
//! Juxtaposition is not multiplication; `*` is required. Exponents apply to
//! generator atoms only. Comments run from `#` to the end of the line.

use serde::Serialize;

use crate::chart::Chart;
use crate::comalg::{CPoly, CommIdeal};
use crate::error::{Error, Result};
use crate::ncgb::{ModulePresentation, OpVec, Side};
use crate::opalg::{normal_form, OpElement, OpExpr};
use crate::Rat;

// --- lexer ---

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Comma,
    Semi,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn perr<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        col,
        msg: msg.into(),
    })
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (lno, line) in text.lines().enumerate() {
        let line_no = lno + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            match c {
                '#' => break,
                c if c.is_whitespace() => {
                    i += 1;
                }
                '+' => {
                    out.push(Spanned { tok: Tok::Plus, line: line_no, col });
                    i += 1;
                }
                '-' => {
                    out.push(Spanned { tok: Tok::Minus, line: line_no, col });
                    i += 1;
                }
                '*' => {
                    out.push(Spanned { tok: Tok::Star, line: line_no, col });
                    i += 1;
                }
                '^' => {
                    out.push(Spanned { tok: Tok::Caret, line: line_no, col });
                    i += 1;
                }
                '/' => {
                    out.push(Spanned { tok: Tok::Slash, line: line_no, col });
                    i += 1;
                }
                '(' => {
                    out.push(Spanned { tok: Tok::LParen, line: line_no, col });
                    i += 1;
                }
                ')' => {
                    out.push(Spanned { tok: Tok::RParen, line: line_no, col });
                    i += 1;
                }
                '{' => {
                    out.push(Spanned { tok: Tok::LBrace, line: line_no, col });
                    i += 1;
                }
                '}' => {
                    out.push(Spanned { tok: Tok::RBrace, line: line_no, col });
                    i += 1;
                }
                '[' => {
                    out.push(Spanned { tok: Tok::LBracket, line: line_no, col });
                    i += 1;
                }
                ']' => {
                    out.push(Spanned { tok: Tok::RBracket, line: line_no, col });
                    i += 1;
                }
                '=' => {
                    out.push(Spanned { tok: Tok::Eq, line: line_no, col });
                    i += 1;
                }
                ',' => {
                    out.push(Spanned { tok: Tok::Comma, line: line_no, col });
                    i += 1;
                }
                ';' => {
                    out.push(Spanned { tok: Tok::Semi, line: line_no, col });
                    i += 1;
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    match s.parse::<i64>() {
                        Ok(v) => out.push(Spanned { tok: Tok::Int(v), line: line_no, col }),
                        Err(_) => return perr(line_no, col, "integer literal out of range"),
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                    {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    out.push(Spanned { tok: Tok::Ident(s), line: line_no, col });
                }
                other => return perr(line_no, col, format!("unexpected character '{}'", other)),
            }
        }
    }
    Ok(out)
}

// --- expression parsing ---

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(toks: Vec<Spanned>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(s) => (s.line, s.col),
            None => self
                .toks
                .last()
                .map(|s| (s.line, s.col + 1))
                .unwrap_or((1, 1)),
        }
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Spanned> {
        let (l, c) = self.here();
        match self.next() {
            Some(s) if s.tok == tok => Ok(s),
            Some(s) => perr(s.line, s.col, format!("expected {}", what)),
            None => perr(l, c, format!("expected {}, found end of input", what)),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize)> {
        let (l, c) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Ident(s), line, col }) => Ok((s, line, col)),
            Some(s) => perr(s.line, s.col, format!("expected {}", what)),
            None => perr(l, c, format!("expected {}, found end of input", what)),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<i64> {
        let (l, c) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Int(v), .. }) => Ok(v),
            Some(s) => perr(s.line, s.col, format!("expected {}", what)),
            None => perr(l, c, format!("expected {}, found end of input", what)),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if let Some(s) = self.peek() {
            if &s.tok == tok {
                self.pos += 1;
                return true;
            }
        }
        false
    }

    // expression grammar over a generator resolver
    fn expr(&mut self) -> Result<OpExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.term()?;
                acc = OpExpr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.term()?;
                acc = OpExpr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<OpExpr> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.factor()?;
            acc = OpExpr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OpExpr> {
        if self.eat(&Tok::Minus) {
            let inner = self.factor()?;
            return Ok(OpExpr::Neg(Box::new(inner)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<OpExpr> {
        let (l, c) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Int(v), .. }) => {
                if self.eat(&Tok::Slash) {
                    let d = self.expect_int("denominator")?;
                    if d == 0 {
                        return perr(l, c, "zero denominator");
                    }
                    self.reject_caret("a rational literal")?;
                    Ok(OpExpr::Ratio(v, d))
                } else {
                    self.reject_caret("an integer literal")?;
                    Ok(OpExpr::Int(v))
                }
            }
            Some(Spanned { tok: Tok::Ident(name), line, col }) => {
                let gen = parse_generator(&name)
                    .ok_or(Error::UnknownGenerator(name.clone()))
                    .map_err(|_| Error::Parse {
                        line,
                        col,
                        msg: format!("unknown generator '{}'", name),
                    })?;
                if self.eat(&Tok::Caret) {
                    let e = self.expect_int("exponent")?;
                    if e < 0 {
                        return perr(line, col, "negative exponent");
                    }
                    Ok(OpExpr::Pow(Box::new(gen), e as u32))
                } else {
                    Ok(gen)
                }
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.reject_caret("a parenthesized expression")?;
                Ok(inner)
            }
            Some(s) => perr(s.line, s.col, "expected an atom"),
            None => perr(l, c, "expected an atom, found end of input"),
        }
    }

    fn reject_caret(&mut self, what: &str) -> Result<()> {
        if let Some(s) = self.peek() {
            if s.tok == Tok::Caret {
                return perr(
                    s.line,
                    s.col,
                    format!("exponent on a non-atom: '^' cannot follow {}", what),
                );
            }
        }
        Ok(())
    }
}

fn parse_generator(name: &str) -> Option<OpExpr> {
    let (prefix, idx) = split_gen(name)?;
    match prefix {
        "x" => Some(OpExpr::X(idx)),
        "t" => Some(OpExpr::T(idx)),
        "d" => Some(OpExpr::D(idx)),
        "th" => Some(OpExpr::Th(idx)),
        _ => None,
    }
}

fn split_gen(name: &str) -> Option<(&str, usize)> {
    let pos = name.find(|c: char| c.is_ascii_digit())?;
    let (prefix, digits) = name.split_at(pos);
    let idx: usize = digits.parse().ok()?;
    if idx == 0 {
        return None;
    }
    Some((prefix, idx))
}

/// Parses an operator expression over a chart into canonical PBW form.
pub fn parse_expression(chart: &Chart, text: &str) -> Result<OpElement<Rat>> {
    let toks = lex(text)?;
    let mut p = Parser::new(toks);
    let e = p.expr()?;
    if !p.at_end() {
        let (l, c) = p.here();
        return perr(l, c, "trailing input after expression");
    }
    normal_form(chart, &e)
}

/// Parses a commutative polynomial in the cotangent coordinates
/// (x<i>, t<j>, xi<i>, tau<j>).
pub fn parse_comm_poly(chart: &Chart, text: &str) -> Result<CPoly<Rat>> {
    let toks = lex(text)?;
    let mut p = Parser::new(toks);
    let e = p.expr()?;
    if !p.at_end() {
        let (l, c) = p.here();
        return perr(l, c, "trailing input after expression");
    }
    comm_eval(chart, &e)
}

fn comm_eval(chart: &Chart, e: &OpExpr) -> Result<CPoly<Rat>> {
    use num_traits::One;
    let nv = chart.nvars();
    Ok(match e {
        OpExpr::Int(v) => CPoly::constant(nv, crate::scalar::Scalar::from_int(*v)),
        OpExpr::Ratio(n, d) => CPoly::constant(nv, crate::scalar::Scalar::from_ratio(*n, *d)),
        OpExpr::X(i) => {
            if *i == 0 || *i > chart.n_free() {
                return Err(Error::UnknownGenerator(format!("x{}", i)));
            }
            CPoly::var(nv, chart.var_x(*i))
        }
        OpExpr::T(j) => {
            if *j == 0 || *j > chart.n_log() {
                return Err(Error::UnknownGenerator(format!("t{}", j)));
            }
            CPoly::var(nv, chart.var_t(*j))
        }
        // commutative names: d<i> is ξ_i, th<j> is τ_j, and the explicit
        // xi<i>/tau<j> forms are resolved before evaluation
        OpExpr::D(i) => {
            if *i == 0 || *i > chart.n_free() {
                return Err(Error::UnknownGenerator(format!("xi{}", i)));
            }
            CPoly::var(nv, chart.var_xi(*i))
        }
        OpExpr::Th(j) => {
            if *j == 0 || *j > chart.n_log() {
                return Err(Error::UnknownGenerator(format!("tau{}", j)));
            }
            CPoly::var(nv, chart.var_tau(*j))
        }
        OpExpr::Neg(a) => comm_eval(chart, a)?.neg(),
        OpExpr::Add(a, b) => comm_eval(chart, a)?.add(&comm_eval(chart, b)?),
        OpExpr::Sub(a, b) => comm_eval(chart, a)?.sub(&comm_eval(chart, b)?),
        OpExpr::Mul(a, b) => comm_eval(chart, a)?.mul(&comm_eval(chart, b)?),
        OpExpr::Pow(a, k) => {
            let base = comm_eval(chart, a)?;
            let mut acc = CPoly::constant(nv, Rat::one());
            for _ in 0..*k {
                acc = acc.mul(&base);
            }
            acc
        }
    })
}

fn parse_comm_generator(name: &str) -> Option<OpExpr> {
    let (prefix, idx) = split_gen(name)?;
    match prefix {
        "x" => Some(OpExpr::X(idx)),
        "t" => Some(OpExpr::T(idx)),
        "xi" => Some(OpExpr::D(idx)),
        "tau" => Some(OpExpr::Th(idx)),
        _ => None,
    }
}

// --- problem files ---

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskCommand {
    Check,
    Gb,
    Resolve,
    Charvar,
    Holonomic,
    Dual,
    Restrict,
    Split,
    Perverse,
    Gabber,
}

impl TaskCommand {
    fn from_name(name: &str) -> Option<TaskCommand> {
        Some(match name {
            "check" => TaskCommand::Check,
            "gb" => TaskCommand::Gb,
            "resolve" => TaskCommand::Resolve,
            "charvar" => TaskCommand::Charvar,
            "holonomic" => TaskCommand::Holonomic,
            "dual" => TaskCommand::Dual,
            "restrict" => TaskCommand::Restrict,
            "split" => TaskCommand::Split,
            "perverse" => TaskCommand::Perverse,
            "gabber" => TaskCommand::Gabber,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TaskSpec {
    pub command: TaskCommand,
    pub module: String,
    /// vanishing set for restrict
    pub stratum: Option<Vec<usize>>,
    /// stratum level for split
    pub k: Option<usize>,
    /// Z ideal generators for split
    pub z: Option<Vec<CPoly<Rat>>>,
    /// cohomological placement for perverse (default 0)
    pub degree: Option<isize>,
    /// apply the Verdier dual before the perverse checks
    pub dual: bool,
    /// perverse truncation level, when requested
    pub truncate: Option<isize>,
    /// order override: "degrevlex" (default) or "lex" refinement
    pub order: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub chart: Chart,
    pub modules: Vec<(String, ModulePresentation<Rat>)>,
    pub tasks: Vec<TaskSpec>,
}

impl ProblemFile {
    pub fn module(&self, name: &str) -> Option<&ModulePresentation<Rat>> {
        self.modules
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
    }
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let toks = lex(text)?;
    let mut p = Parser::new(toks);
    let mut chart: Option<Chart> = None;
    let mut modules: Vec<(String, ModulePresentation<Rat>)> = Vec::new();
    let mut tasks: Vec<TaskSpec> = Vec::new();
    while !p.at_end() {
        let (kw, line, col) = p.expect_ident("'chart', 'module', or 'task'")?;
        match kw.as_str() {
            "chart" => {
                if chart.is_some() {
                    return perr(line, col, "duplicate chart declaration");
                }
                chart = Some(parse_chart_block(&mut p)?);
            }
            "module" => {
                let c = match &chart {
                    Some(c) => c.clone(),
                    None => return perr(line, col, "module before chart declaration"),
                };
                let (name, l2, c2) = p.expect_ident("module name")?;
                if modules.iter().any(|(n, _)| n == &name) {
                    return perr(l2, c2, format!("duplicate module name '{}'", name));
                }
                let m = parse_module_block(&mut p, &c)?;
                modules.push((name, m));
            }
            "task" => {
                let t = parse_task(&mut p, chart.as_ref())?;
                if !modules.iter().any(|(n, _)| n == &t.module) {
                    return perr(line, col, format!("unknown module '{}'", t.module));
                }
                tasks.push(t);
            }
            other => {
                return perr(
                    line,
                    col,
                    format!("expected 'chart', 'module', or 'task', found '{}'", other),
                )
            }
        }
    }
    let chart = match chart {
        Some(c) => c,
        None => {
            if modules.is_empty() && tasks.is_empty() {
                // an empty file is a valid no-op run on the trivial chart
                Chart::new(0, 0, [])?
            } else {
                return perr(1, 1, "missing chart declaration");
            }
        }
    };
    Ok(ProblemFile {
        chart,
        modules,
        tasks,
    })
}

fn parse_chart_block(p: &mut Parser) -> Result<Chart> {
    p.expect(Tok::LBrace, "'{'")?;
    let mut free: Option<i64> = None;
    let mut log: Option<i64> = None;
    let mut idealized: Vec<usize> = Vec::new();
    loop {
        let (key, line, col) = p.expect_ident("'free', 'log', or 'idealized'")?;
        p.expect(Tok::Eq, "'='")?;
        match key.as_str() {
            "free" => free = Some(p.expect_int("number of free coordinates")?),
            "log" => log = Some(p.expect_int("number of log coordinates")?),
            "idealized" => {
                p.expect(Tok::LBrace, "'{'")?;
                if !p.eat(&Tok::RBrace) {
                    loop {
                        let v = p.expect_int("idealized index")?;
                        if v < 1 {
                            return perr(line, col, "idealized indices are 1-based");
                        }
                        idealized.push(v as usize);
                        if p.eat(&Tok::RBrace) {
                            break;
                        }
                        p.expect(Tok::Comma, "',' or '}'")?;
                    }
                }
            }
            other => return perr(line, col, format!("unknown chart field '{}'", other)),
        }
        if p.eat(&Tok::RBrace) {
            break;
        }
        p.expect(Tok::Comma, "',' or '}'")?;
    }
    let (l, c) = p.here();
    let free = free.ok_or(Error::Parse { line: l, col: c, msg: "chart needs 'free'".into() })?;
    let log = log.ok_or(Error::Parse { line: l, col: c, msg: "chart needs 'log'".into() })?;
    if free < 0 || log < 0 {
        return perr(l, c, "coordinate counts must be non-negative");
    }
    Chart::new(free as usize, log as usize, idealized)
}

fn parse_module_block(p: &mut Parser, chart: &Chart) -> Result<ModulePresentation<Rat>> {
    p.expect(Tok::LBrace, "'{'")?;
    let mut side = Side::Left;
    let mut rank: Option<i64> = None;
    let mut rows: Vec<OpVec<Rat>> = Vec::new();
    loop {
        if p.eat(&Tok::RBrace) {
            break;
        }
        let (key, line, col) = p.expect_ident("'side', 'rank', or 'row'")?;
        match key.as_str() {
            "side" => {
                p.expect(Tok::Eq, "'='")?;
                let (v, l2, c2) = p.expect_ident("'left' or 'right'")?;
                side = match v.as_str() {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    _ => return perr(l2, c2, "side must be 'left' or 'right'"),
                };
                p.expect(Tok::Semi, "';'")?;
            }
            "rank" => {
                p.expect(Tok::Eq, "'='")?;
                let v = p.expect_int("rank")?;
                if v < 1 {
                    return perr(line, col, "rank must be at least 1");
                }
                rank = Some(v);
                p.expect(Tok::Semi, "';'")?;
            }
            "row" => {
                let m = match rank {
                    Some(r) => r as usize,
                    None => return perr(line, col, "row before rank declaration"),
                };
                let mut entries: Vec<OpElement<Rat>> = Vec::new();
                loop {
                    let e = p.expr()?;
                    entries.push(normal_form(chart, &e)?);
                    if p.eat(&Tok::Semi) {
                        break;
                    }
                    p.expect(Tok::Comma, "',' or ';'")?;
                }
                if entries.len() != m {
                    return perr(
                        line,
                        col,
                        format!("row has {} entries, expected rank {}", entries.len(), m),
                    );
                }
                rows.push(OpVec::from_ops(chart, &entries));
            }
            other => return perr(line, col, format!("unknown module field '{}'", other)),
        }
    }
    let (l, c) = p.here();
    let rank = rank.ok_or(Error::Parse { line: l, col: c, msg: "module needs 'rank'".into() })? as usize;
    let rows = match side {
        Side::Left => rows,
        // right-module relation rows are stored via the transposition
        Side::Right => rows
            .iter()
            .map(|r| r.map_components(|op| op.transpose()))
            .collect(),
    };
    Ok(ModulePresentation::new(chart.clone(), side, rank, rows))
}

fn parse_task(p: &mut Parser, chart: Option<&Chart>) -> Result<TaskSpec> {
    let (cmd, line, col) = p.expect_ident("task command")?;
    let command = TaskCommand::from_name(&cmd)
        .ok_or(Error::Parse { line, col, msg: format!("unknown task '{}'", cmd) })?;
    let mut module: Option<String> = None;
    let mut spec = TaskSpec {
        command,
        module: String::new(),
        stratum: None,
        k: None,
        z: None,
        degree: None,
        dual: false,
        truncate: None,
        order: None,
    };
    while !p.eat(&Tok::Semi) {
        let (key, l2, c2) = p.expect_ident("task option")?;
        p.expect(Tok::Eq, "'='")?;
        match key.as_str() {
            "module" => {
                let (name, _, _) = p.expect_ident("module name")?;
                module = Some(name);
            }
            "stratum" => {
                p.expect(Tok::LBrace, "'{'")?;
                let mut set = Vec::new();
                if !p.eat(&Tok::RBrace) {
                    loop {
                        set.push(p.expect_int("log direction")? as usize);
                        if p.eat(&Tok::RBrace) {
                            break;
                        }
                        p.expect(Tok::Comma, "',' or '}'")?;
                    }
                }
                spec.stratum = Some(set);
            }
            "k" => {
                spec.k = Some(p.expect_int("stratum level")? as usize);
            }
            "z" => {
                let chart = chart
                    .ok_or(Error::Parse { line: l2, col: c2, msg: "z before chart".into() })?;
                p.expect(Tok::LBracket, "'['")?;
                let mut gens = Vec::new();
                if !p.eat(&Tok::RBracket) {
                    loop {
                        let e = parse_comm_expr(p)?;
                        gens.push(comm_eval(chart, &e)?);
                        if p.eat(&Tok::RBracket) {
                            break;
                        }
                        p.expect(Tok::Comma, "',' or ']'")?;
                    }
                }
                spec.z = Some(gens);
            }
            "degree" => {
                let neg = p.eat(&Tok::Minus);
                let v = p.expect_int("degree")?;
                spec.degree = Some(if neg { -v as isize } else { v as isize });
            }
            "dual" => {
                let (v, l3, c3) = p.expect_ident("'true' or 'false'")?;
                spec.dual = match v.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return perr(l3, c3, "dual must be 'true' or 'false'"),
                };
            }
            "truncate" => {
                let neg = p.eat(&Tok::Minus);
                let v = p.expect_int("truncation level")?;
                spec.truncate = Some(if neg { -v as isize } else { v as isize });
            }
            "order" => {
                let (v, l3, c3) = p.expect_ident("'degrevlex' or 'lex'")?;
                if v != "degrevlex" && v != "lex" {
                    return perr(l3, c3, "order must be 'degrevlex' or 'lex'");
                }
                spec.order = Some(v);
            }
            other => return perr(l2, c2, format!("unknown task option '{}'", other)),
        }
    }
    let (l, c) = p.here();
    spec.module = module.ok_or(Error::Parse { line: l, col: c, msg: format!("task '{}' needs module=", cmd) })?;
    // option validity per command
    let bad = |msg: &str| -> Result<TaskSpec> { perr(line, col, msg) };
    match spec.command {
        TaskCommand::Restrict if spec.stratum.is_none() => {
            return bad("restrict needs stratum={...}")
        }
        TaskCommand::Split if spec.k.is_none() || spec.z.is_none() => {
            return bad("split needs k= and z=[...]")
        }
        TaskCommand::Split | TaskCommand::Restrict => {}
        _ => {
            if spec.stratum.is_some() || spec.k.is_some() || spec.z.is_some() {
                return bad("stratum/k/z options only apply to restrict and split");
            }
        }
    }
    Ok(spec)
}

/// Parses an expression with commutative generator names.
fn parse_comm_expr(p: &mut Parser) -> Result<OpExpr> {
    // reuse the operator grammar but remap the generator namespace:
    // temporarily parse with operator names rejected in favor of comm names
    let start = p.pos;
    // parse with the operator atom rule, then re-resolve identifiers
    let _ = start;
    p.comm_expr()
}

impl Parser {
    fn comm_expr(&mut self) -> Result<OpExpr> {
        let mut acc = self.comm_term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.comm_term()?;
                acc = OpExpr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.comm_term()?;
                acc = OpExpr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn comm_term(&mut self) -> Result<OpExpr> {
        let mut acc = self.comm_factor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.comm_factor()?;
            acc = OpExpr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn comm_factor(&mut self) -> Result<OpExpr> {
        if self.eat(&Tok::Minus) {
            let inner = self.comm_factor()?;
            return Ok(OpExpr::Neg(Box::new(inner)));
        }
        self.comm_atom()
    }

    fn comm_atom(&mut self) -> Result<OpExpr> {
        let (l, c) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Int(v), .. }) => {
                if self.eat(&Tok::Slash) {
                    let d = self.expect_int("denominator")?;
                    if d == 0 {
                        return perr(l, c, "zero denominator");
                    }
                    Ok(OpExpr::Ratio(v, d))
                } else {
                    Ok(OpExpr::Int(v))
                }
            }
            Some(Spanned { tok: Tok::Ident(name), line, col }) => {
                let gen = parse_comm_generator(&name).ok_or(Error::Parse {
                    line,
                    col,
                    msg: format!("unknown coordinate '{}'", name),
                })?;
                if self.eat(&Tok::Caret) {
                    let e = self.expect_int("exponent")?;
                    if e < 0 {
                        return perr(line, col, "negative exponent");
                    }
                    Ok(OpExpr::Pow(Box::new(gen), e as u32))
                } else {
                    Ok(gen)
                }
            }
            Some(Spanned { tok: Tok::LParen, .. }) => {
                let inner = self.comm_expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(s) => perr(s.line, s.col, "expected an atom"),
            None => perr(l, c, "expected an atom, found end of input"),
        }
    }
}

/// Builds the Z ideal of a split task over the problem chart.
pub fn z_ideal(problem: &ProblemFile, spec: &TaskSpec) -> Result<CommIdeal<Rat>> {
    CommIdeal::new(
        problem.chart.clone(),
        spec.z.clone().unwrap_or_default(),
    )
}
