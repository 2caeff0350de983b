//! CPLEX LP file format: writer, and a reader for the subset the writer
//! produces (minimization, linear rows, explicit bounds, binaries).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{FlatExpr, FlatMilp, FlatRow, FlatVar, Sense, Stage, StageScope, VarKind};

const TERMS_PER_LINE: usize = 8;

/// Maps model names onto names the LP format accepts, keeping them unique.
pub fn lp_names<'a>(names: impl Iterator<Item = &'a str>, fallback: char) -> Vec<String> {
    let mut used = HashMap::new();
    names
        .enumerate()
        .map(|(i, raw)| {
            let mut s: String = raw
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c) { c } else { '_' })
                .collect();
            if s.is_empty() {
                s = format!("{fallback}{i}");
            }
            let first = s.chars().next().unwrap_or('_');
            if first.is_ascii_digit() || first == '.' || first == 'e' || first == 'E' {
                s.insert(0, '_');
            }
            if used.contains_key(&s) {
                s = format!("{s}_{i}");
            }
            used.insert(s.clone(), i);
            s
        })
        .collect()
}

fn push_terms(out: &mut String, coeffs: &[(usize, f64)], names: &[String]) {
    for (k, &(j, a)) in coeffs.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        if a < 0.0 {
            let _ = write!(out, " - {} {}", -a, names[j]);
        } else {
            let _ = write!(out, " + {} {}", a, names[j]);
        }
    }
}

/// Renders `milp` minimizing `objective` as LP file text.
pub fn write_lp_string(milp: &FlatMilp, objective: &FlatExpr) -> String {
    let vnames = lp_names(milp.vars.iter().map(|v| v.name.as_str()), 'x');
    let rnames = lp_names(milp.rows.iter().map(|r| r.name.as_str()), 'c');
    let mut out = String::new();
    let _ = writeln!(out, "\\ scenario {}", milp.scenario);
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, &objective.coeffs, &vnames);
    if objective.constant != 0.0 || objective.coeffs.is_empty() {
        if objective.constant < 0.0 {
            let _ = write!(out, " - {}", -objective.constant);
        } else {
            let _ = write!(out, " + {}", objective.constant);
        }
    }
    out.push_str("\nSubject To\n");
    for (row, name) in milp.rows.iter().zip(&rnames) {
        let _ = write!(out, " {name}:");
        if row.coeffs.is_empty() {
            // the format needs at least one term
            let _ = write!(out, " 0 {}", vnames.first().map(String::as_str).unwrap_or("x0"));
        }
        push_terms(&mut out, &row.coeffs, &vnames);
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for (v, name) in milp.vars.iter().zip(&vnames) {
        let line = match (v.lower.is_finite(), v.upper.is_finite()) {
            _ if v.lower == v.upper => format!(" {name} = {}", v.lower),
            (true, true) => format!(" {} <= {name} <= {}", v.lower, v.upper),
            (true, false) => format!(" {name} >= {}", v.lower),
            (false, true) => format!(" -inf <= {name} <= {}", v.upper),
            (false, false) => format!(" {name} free"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    let bins: Vec<&String> = milp
        .vars
        .iter()
        .zip(&vnames)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for chunk in bins.chunks(TERMS_PER_LINE) {
            out.push(' ');
            out.push_str(&chunk.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
    }
    out.push_str("End\n");
    out
}

pub fn export_lp_file(milp: &FlatMilp, objective: &FlatExpr, path: &Path) -> Result<()> {
    std::fs::write(path, write_lp_string(milp, objective))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Colon,
    Cmp(Sense),
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Tok>> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\r' => i += 1,
            '+' => {
                toks.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                toks.push(Tok::Minus);
                i += 1;
            }
            ':' => {
                toks.push(Tok::Colon);
                i += 1;
            }
            '<' | '>' | '=' => {
                let mut op = String::from(c);
                if i + 1 < chars.len() && "<>=".contains(chars[i + 1]) {
                    op.push(chars[i + 1]);
                    i += 1;
                }
                i += 1;
                let sense = match op.as_str() {
                    "<" | "<=" | "=<" => Sense::Le,
                    ">" | ">=" | "=>" => Sense::Ge,
                    "=" => Sense::Eq,
                    _ => return Err(Error::LpParse { line: lineno, msg: format!("bad operator `{op}`") }),
                };
                toks.push(Tok::Cmp(sense));
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() {
                    let ch = chars[i];
                    let exp_sign = (ch == '+' || ch == '-') && i > start && matches!(chars[i - 1], 'e' | 'E');
                    if ch.is_ascii_digit() || ch == '.' || ch == 'e' || ch == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<f64>()
                    .map_err(|_| Error::LpParse { line: lineno, msg: format!("bad number `{s}`") })?;
                toks.push(Tok::Num(v));
            }
            _ => {
                let start = i;
                while i < chars.len() && !" \t\r+-:<>=".contains(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                match s.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" => toks.push(Tok::Num(f64::INFINITY)),
                    _ => toks.push(Tok::Name(s)),
                }
            }
        }
    }
    Ok(toks)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
}

struct Parser {
    names: HashMap<String, usize>,
    order: Vec<String>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    binary: Vec<bool>,
}

impl Parser {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&j) = self.names.get(name) {
            return j;
        }
        let j = self.order.len();
        self.names.insert(name.to_string(), j);
        self.order.push(name.to_string());
        self.lower.push(0.0);
        self.upper.push(f64::INFINITY);
        self.binary.push(false);
        j
    }

    /// Parses `[name:] terms [op rhs]` into (label, coefficients, constant, op+rhs).
    #[allow(clippy::type_complexity)]
    fn linear(
        &mut self,
        toks: &[Tok],
        lineno: usize,
    ) -> Result<(Option<String>, Vec<(usize, f64)>, f64, Option<(Sense, f64)>)> {
        let mut k = 0;
        let mut label = None;
        if let (Some(Tok::Name(n)), Some(Tok::Colon)) = (toks.first(), toks.get(1)) {
            label = Some(n.clone());
            k = 2;
        }
        let mut coeffs: Vec<(usize, f64)> = Vec::new();
        let mut constant = 0.0;
        let mut sign = 1.0;
        let mut pending: Option<f64> = None;
        let err = |msg: &str| Error::LpParse { line: lineno, msg: msg.to_string() };
        while k < toks.len() {
            match &toks[k] {
                Tok::Plus => {}
                Tok::Minus => sign = -sign,
                Tok::Num(v) => {
                    if pending.is_some() {
                        return Err(err("two numbers in a row"));
                    }
                    pending = Some(*v);
                }
                Tok::Name(n) => {
                    let c = sign * pending.take().unwrap_or(1.0);
                    let j = self.var(n);
                    coeffs.push((j, c));
                    sign = 1.0;
                }
                Tok::Colon => return Err(err("unexpected `:`")),
                Tok::Cmp(s) => {
                    if let Some(v) = pending.take() {
                        constant += sign * v;
                    }
                    let rest = &toks[k + 1..];
                    let (neg, num) = match rest {
                        [Tok::Num(v)] => (false, *v),
                        [Tok::Minus, Tok::Num(v)] => (true, *v),
                        [Tok::Plus, Tok::Num(v)] => (false, *v),
                        _ => return Err(err("expected a numeric right-hand side")),
                    };
                    return Ok((label, coeffs, constant, Some((*s, if neg { -num } else { num }))));
                }
            }
            k += 1;
        }
        if let Some(v) = pending {
            constant += sign * v;
        }
        Ok((label, coeffs, constant, None))
    }

    fn bound(&mut self, toks: &[Tok], lineno: usize) -> Result<()> {
        let err = |msg: &str| Error::LpParse { line: lineno, msg: msg.to_string() };
        // fold leading signs into numbers
        let mut t: Vec<Tok> = Vec::new();
        let mut neg = false;
        for tok in toks {
            match tok {
                Tok::Minus => neg = !neg,
                Tok::Plus => {}
                Tok::Num(v) => {
                    t.push(Tok::Num(if neg { -v } else { *v }));
                    neg = false;
                }
                other => t.push(other.clone()),
            }
        }
        match t.as_slice() {
            [Tok::Name(n), Tok::Name(f)] if f.eq_ignore_ascii_case("free") => {
                let j = self.var(n);
                self.lower[j] = f64::NEG_INFINITY;
                self.upper[j] = f64::INFINITY;
            }
            [Tok::Num(lo), Tok::Cmp(Sense::Le), Tok::Name(n), Tok::Cmp(Sense::Le), Tok::Num(hi)] => {
                let j = self.var(n);
                self.lower[j] = *lo;
                self.upper[j] = *hi;
            }
            [Tok::Name(n), Tok::Cmp(s), Tok::Num(v)] => {
                let j = self.var(n);
                match s {
                    Sense::Le => self.upper[j] = *v,
                    Sense::Ge => self.lower[j] = *v,
                    Sense::Eq => {
                        self.lower[j] = *v;
                        self.upper[j] = *v;
                    }
                }
            }
            [Tok::Num(v), Tok::Cmp(s), Tok::Name(n)] => {
                let j = self.var(n);
                match s {
                    Sense::Le => self.lower[j] = *v,
                    Sense::Ge => self.upper[j] = *v,
                    Sense::Eq => {
                        self.lower[j] = *v;
                        self.upper[j] = *v;
                    }
                }
            }
            _ => return Err(err("unsupported bound")),
        }
        Ok(())
    }
}

/// A parsed LP file: the constraint system and its objective.
#[derive(Debug, Clone)]
pub struct LpFile {
    pub milp: FlatMilp,
    pub objective: FlatExpr,
}

pub fn parse_lp_str(text: &str) -> Result<LpFile> {
    let mut p = Parser {
        names: HashMap::new(),
        order: Vec::new(),
        lower: Vec::new(),
        upper: Vec::new(),
        binary: Vec::new(),
    };
    let mut section = Section::None;
    let mut buffer: Vec<Tok> = Vec::new();
    let mut buffer_line = 0;
    let mut objective = FlatExpr::default();
    let mut rows: Vec<FlatRow> = Vec::new();
    let mut bound_order: Vec<String> = Vec::new();
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        let keyword = match lower.as_str() {
            "minimize" | "minimise" | "minimum" | "min" => Some(Section::Objective),
            "maximize" | "maximise" | "maximum" | "max" => {
                return Err(Error::LpParse { line: lineno, msg: "maximization is not supported".into() })
            }
            "subject to" | "such that" | "st" | "s.t." | "st." => Some(Section::Constraints),
            "bounds" | "bound" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "general" | "generals" | "gen" | "semi-continuous" | "semis" | "semi" | "sos" => {
                return Err(Error::LpParse { line: lineno, msg: format!("section `{line}` is not supported") })
            }
            "end" => {
                ended = true;
                Some(Section::None)
            }
            _ => None,
        };
        if let Some(next) = keyword {
            if !buffer.is_empty() {
                flush(&mut p, section, &mut buffer, buffer_line, &mut objective, &mut rows)?;
            }
            section = next;
            if ended {
                break;
            }
            continue;
        }
        let toks = tokenize(line, lineno)?;
        match section {
            Section::None => {
                return Err(Error::LpParse { line: lineno, msg: "content outside a section".into() })
            }
            Section::Objective | Section::Constraints => {
                // a new labelled row starts when a `name:` appears at line start
                let starts_row = matches!((toks.first(), toks.get(1)), (Some(Tok::Name(_)), Some(Tok::Colon)));
                if starts_row && !buffer.is_empty() && section == Section::Constraints {
                    flush(&mut p, section, &mut buffer, buffer_line, &mut objective, &mut rows)?;
                }
                if buffer.is_empty() {
                    buffer_line = lineno;
                }
                let has_cmp = toks.iter().any(|t| matches!(t, Tok::Cmp(_)));
                buffer.extend(toks);
                if section == Section::Constraints && has_cmp {
                    flush(&mut p, section, &mut buffer, buffer_line, &mut objective, &mut rows)?;
                }
            }
            Section::Bounds => {
                if let Some(Tok::Name(n)) = toks.iter().find(|t| matches!(t, Tok::Name(n) if !n.eq_ignore_ascii_case("free"))) {
                    bound_order.push(n.clone());
                }
                p.bound(&toks, lineno)?;
            }
            Section::Binaries => {
                for t in toks {
                    match t {
                        Tok::Name(n) => {
                            let j = p.var(&n);
                            p.binary[j] = true;
                            if p.upper[j] == f64::INFINITY {
                                p.upper[j] = 1.0;
                            }
                        }
                        _ => return Err(Error::LpParse { line: lineno, msg: "expected variable names".into() }),
                    }
                }
            }
        }
    }
    if !ended {
        return Err(Error::LpParse { line: text.lines().count(), msg: "missing `End`".into() });
    }

    // column order: as listed in Bounds, then anything else by first use
    let mut perm: Vec<usize> = Vec::with_capacity(p.order.len());
    let mut placed = vec![false; p.order.len()];
    for n in bound_order.iter().chain(p.order.clone().iter()) {
        let j = p.names[n];
        if !placed[j] {
            placed[j] = true;
            perm.push(j);
        }
    }
    let mut new_index = vec![0; perm.len()];
    for (k, &j) in perm.iter().enumerate() {
        new_index[j] = k;
    }
    let remap = |c: &[(usize, f64)]| -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = c.iter().map(|&(j, a)| (new_index[j], a)).filter(|&(_, a)| a != 0.0).collect();
        v.sort_by_key(|&(j, _)| j);
        v
    };
    let vars = perm
        .iter()
        .map(|&j| FlatVar {
            name: p.order[j].clone(),
            stage: Stage::Second,
            kind: if p.binary[j] { VarKind::Binary } else { VarKind::Continuous },
            lower: p.lower[j],
            upper: p.upper[j],
        })
        .collect();
    let rows = rows.into_iter().map(|r| FlatRow { coeffs: remap(&r.coeffs), ..r }).collect();
    let objective = FlatExpr { coeffs: remap(&objective.coeffs), constant: objective.constant };
    Ok(LpFile {
        milp: FlatMilp {
            scenario: String::new(),
            vars,
            rows,
            objectives: vec![objective.clone()],
            objective_names: vec!["obj".into()],
        },
        objective,
    })
}

fn flush(
    p: &mut Parser,
    section: Section,
    buffer: &mut Vec<Tok>,
    lineno: usize,
    objective: &mut FlatExpr,
    rows: &mut Vec<FlatRow>,
) -> Result<()> {
    let toks = std::mem::take(buffer);
    let (label, coeffs, constant, cmp) = p.linear(&toks, lineno)?;
    match section {
        Section::Objective => {
            if cmp.is_some() {
                return Err(Error::LpParse { line: lineno, msg: "comparison in objective".into() });
            }
            objective.coeffs.extend(coeffs);
            objective.constant += constant;
        }
        Section::Constraints => {
            let (sense, rhs) = cmp.ok_or(Error::LpParse { line: lineno, msg: "constraint without sense".into() })?;
            let name = label.unwrap_or_else(|| format!("c{}", rows.len()));
            rows.push(FlatRow { name, coeffs, sense, rhs: rhs - constant, scope: StageScope::Coupled });
        }
        _ => {}
    }
    Ok(())
}

pub fn read_lp_file(path: &Path) -> Result<LpFile> {
    parse_lp_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> (FlatMilp, FlatExpr) {
        let vars = vec![
            FlatVar { name: "b".into(), stage: Stage::First, kind: VarKind::Binary, lower: 0.0, upper: 1.0 },
            FlatVar { name: "x".into(), stage: Stage::Second, kind: VarKind::Continuous, lower: 0.0, upper: 4.5 },
            FlatVar { name: "free var".into(), stage: Stage::Second, kind: VarKind::Continuous, lower: f64::NEG_INFINITY, upper: f64::INFINITY },
        ];
        let rows = vec![
            FlatRow { name: "cap".into(), coeffs: vec![(1, 1.0), (0, -3.25)], sense: Sense::Le, rhs: 0.0, scope: StageScope::Coupled },
            FlatRow { name: "bal".into(), coeffs: vec![(1, 1.0), (2, -1.0)], sense: Sense::Eq, rhs: 1e-3, scope: StageScope::Coupled },
        ];
        let obj = FlatExpr { coeffs: vec![(0, 2.0), (1, -1.5), (2, 0.1)], constant: 7.0 };
        let milp = FlatMilp { scenario: "s".into(), vars, rows, objectives: vec![obj.clone()], objective_names: vec!["f".into()] };
        (milp, obj)
    }

    #[test]
    fn writes_sections() {
        let (m, o) = tiny();
        let s = write_lp_string(&m, &o);
        assert!(s.contains("Minimize"));
        assert!(s.contains("Subject To"));
        assert!(s.contains(" bal: + 1 x - 1 free_var = 0.001"));
        assert!(s.contains("Binaries\n b\n"));
        assert!(s.contains(" free_var free"));
        assert!(s.trim_end().ends_with("End"));
    }

    #[test]
    fn round_trip_preserves_structure() {
        let (m, o) = tiny();
        let parsed = parse_lp_str(&write_lp_string(&m, &o)).unwrap();
        assert_eq!(parsed.milp.vars.len(), 3);
        assert_eq!(parsed.milp.vars[0].kind, VarKind::Binary);
        assert_eq!(parsed.milp.vars[1].upper, 4.5);
        assert_eq!(parsed.milp.vars[2].lower, f64::NEG_INFINITY);
        assert_eq!(parsed.milp.rows.len(), 2);
        let mut cap = m.rows[0].coeffs.clone();
        cap.sort_by_key(|c| c.0);
        assert_eq!(parsed.milp.rows[0].coeffs, cap);
        assert_eq!(parsed.milp.rows[1].sense, Sense::Eq);
        assert_eq!(parsed.milp.rows[1].rhs, 1e-3);
        assert_eq!(parsed.objective, o);
    }

    #[test]
    fn sanitizes_and_uniquifies_names() {
        let names = lp_names(["a b", "a_b", "1x", "", "e5"].into_iter(), 'x');
        assert_eq!(names, vec!["a_b", "a_b_1", "_1x", "x3", "_e5"]);
    }

    #[test]
    fn rejects_unsupported_input() {
        assert!(parse_lp_str("Maximize\n obj: x\nEnd\n").is_err());
        assert!(parse_lp_str("Minimize\n obj: x\n").is_err());
        assert!(parse_lp_str("Minimize\n obj: x\nSubject To\n c: x + y\nEnd\n").is_err());
    }

    #[test]
    fn reads_multiline_rows_and_other_bound_forms() {
        let text = "\\ hand written\nMinimize\n obj: x\n + 2 y\nSubject To\n c1: x + y\n  >= 2\n c2: x - y <= 1\nBounds\n x <= 3\n -1 <= y\nEnd\n";
        let lp = parse_lp_str(text).unwrap();
        assert_eq!(lp.objective.coeffs.len(), 2);
        assert_eq!(lp.milp.rows.len(), 2);
        assert_eq!(lp.milp.rows[0].rhs, 2.0);
        assert_eq!(lp.milp.vars[0].upper, 3.0);
        assert_eq!(lp.milp.vars[1].lower, -1.0);
    }
}
