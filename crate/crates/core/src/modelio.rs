//! Model export and import in MPS and LP text formats.
//!
//! MPS output is written one whitespace-separated record per line, so it
//! reads as both fixed and free MPS as long as names fit fixed columns and
//! as free MPS otherwise. Sections: `NAME`, `OBJSENSE`, `ROWS`, `COLUMNS`
//! (binaries between `MARKER`/`INTORG`/`INTEND` lines), `RHS`, `RANGES`,
//! `BOUNDS`, `ENDATA`. The objective is the first `N` row; further `N` rows
//! are free constraints. An objective constant `c` is written as RHS `-c`
//! on the objective row. Ranged rows are `G` rows with a range.
//!
//! LP text output has the blocks `Maximize`/`Minimize`, `Subject To`,
//! `Bounds`, `Binary` and `End`, one constraint or bound per line.
//! Two-sided rows are written `lo <= expr <= hi`; infinite values as
//! `-inf`/`+inf`. Bounds other than `[0, +inf)` are listed, except `[0, 1]`
//! on binaries.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Sense, INF};
use crate::milp::MixedIntegerProgram;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFormat {
    Mps,
    LpText,
}

impl std::str::FromStr for ModelFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mps" => Ok(ModelFormat::Mps),
            "lp" | "lp_text" | "lp-text" => Ok(ModelFormat::LpText),
            other => Err(Error::Model(format!("unknown model format `{other}`"))),
        }
    }
}

pub const MAX_NAME_LEN: usize = 64;

pub fn sanitize_name(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        s.push('_');
    }
    s.truncate(MAX_NAME_LEN);
    s
}

fn sanitized_unique<'a>(kind: &str, names: impl Iterator<Item = &'a str>) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in names {
        let s = sanitize_name(n);
        if !seen.insert(s.clone()) {
            return Err(Error::Model(format!(
                "{kind} name `{n}` collides with another after sanitization as `{s}`"
            )));
        }
        out.push(s);
    }
    Ok(out)
}

struct Names {
    vars: Vec<String>,
    rows: Vec<String>,
    obj: String,
}

fn names(lp: &LinearProgram) -> Result<Names> {
    let vars = sanitized_unique("variable", lp.variables.iter().map(|v| v.name.as_str()))?;
    let rows = sanitized_unique("constraint", lp.constraints.iter().map(|c| c.name.as_str()))?;
    let taken: HashSet<&str> = rows.iter().map(String::as_str).collect();
    let mut obj = String::from("obj");
    while taken.contains(obj.as_str()) {
        obj.push('_');
    }
    Ok(Names { vars, rows, obj })
}

fn num(v: f64) -> String {
    if v == INF {
        "+inf".into()
    } else if v == -INF {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

pub fn export_model(mip: &MixedIntegerProgram, format: ModelFormat) -> Result<String> {
    mip.validate()?;
    match format {
        ModelFormat::Mps => write_mps(mip),
        ModelFormat::LpText => write_lp(mip),
    }
}

fn write_mps(mip: &MixedIntegerProgram) -> Result<String> {
    let lp = &mip.base;
    let nm = names(lp)?;
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", sanitize_name(&lp.name));
    let _ = writeln!(out, "OBJSENSE");
    let _ = writeln!(
        out,
        "    {}",
        match lp.objective.sense {
            Sense::Minimize => "MIN",
            Sense::Maximize => "MAX",
        }
    );
    let _ = writeln!(out, "ROWS");
    let _ = writeln!(out, " N  {}", nm.obj);
    for (c, name) in lp.constraints.iter().zip(&nm.rows) {
        let kind = match (c.lower.is_finite(), c.upper.is_finite()) {
            (false, false) => "N",
            (true, true) if c.lower == c.upper => "E",
            (false, true) => "L",
            _ => "G",
        };
        let _ = writeln!(out, " {kind}  {name}");
    }

    // Column-major entries, duplicates summed, in row order.
    let n = lp.variables.len();
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (r, c) in lp.constraints.iter().enumerate() {
        let mut acc: Vec<(usize, f64)> = Vec::new();
        for &(j, v) in &c.coeffs {
            match acc.iter_mut().find(|(k, _)| *k == j) {
                Some(e) => e.1 += v,
                None => acc.push((j, v)),
            }
        }
        for (j, v) in acc {
            if v != 0.0 {
                cols[j].push((r, v));
            }
        }
    }
    let obj = lp.objective_vector();
    let _ = writeln!(out, "COLUMNS");
    let mut in_marker = false;
    let mut marker_id = 0;
    for j in 0..n {
        let binary = mip.is_binary(j);
        if binary != in_marker {
            let tag = if binary { "'INTORG'" } else { "'INTEND'" };
            let _ = writeln!(out, "    MARKER{marker_id}  'MARKER'  {tag}");
            if !binary {
                marker_id += 1;
            }
            in_marker = binary;
        }
        let var = &nm.vars[j];
        if obj[j] != 0.0 || cols[j].is_empty() {
            let _ = writeln!(out, "    {var}  {}  {}", nm.obj, num(obj[j]));
        }
        for &(r, v) in &cols[j] {
            let _ = writeln!(out, "    {var}  {}  {}", nm.rows[r], num(v));
        }
    }
    if in_marker {
        let _ = writeln!(out, "    MARKER{marker_id}  'MARKER'  'INTEND'");
    }

    let _ = writeln!(out, "RHS");
    if lp.objective.constant != 0.0 {
        let _ = writeln!(out, "    RHS  {}  {}", nm.obj, num(-lp.objective.constant));
    }
    for (c, name) in lp.constraints.iter().zip(&nm.rows) {
        let rhs = match (c.lower.is_finite(), c.upper.is_finite()) {
            (false, false) => continue,
            (false, true) => c.upper,
            _ => c.lower,
        };
        if rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {name}  {}", num(rhs));
        }
    }

    let ranged: Vec<_> = lp
        .constraints
        .iter()
        .zip(&nm.rows)
        .filter(|(c, _)| c.lower.is_finite() && c.upper.is_finite() && c.lower != c.upper)
        .collect();
    if !ranged.is_empty() {
        let _ = writeln!(out, "RANGES");
        for (c, name) in ranged {
            let _ = writeln!(out, "    RNG  {name}  {}", num(c.upper - c.lower));
        }
    }

    let mut bounds = String::new();
    for (j, v) in lp.variables.iter().enumerate() {
        let var = &nm.vars[j];
        let (lo, hi) = (v.lower, v.upper);
        if mip.is_binary(j) && lo == 0.0 && hi == 1.0 {
            let _ = writeln!(bounds, " BV BND  {var}");
            continue;
        }
        if lo == -INF && hi == INF {
            let _ = writeln!(bounds, " FR BND  {var}");
        } else if lo == hi {
            let _ = writeln!(bounds, " FX BND  {var}  {}", num(lo));
        } else {
            if lo == -INF {
                let _ = writeln!(bounds, " MI BND  {var}");
            } else if lo != 0.0 {
                let _ = writeln!(bounds, " LO BND  {var}  {}", num(lo));
            }
            if hi != INF {
                let _ = writeln!(bounds, " UP BND  {var}  {}", num(hi));
            }
        }
    }
    if !bounds.is_empty() {
        let _ = writeln!(out, "BOUNDS");
        out.push_str(&bounds);
    }
    let _ = writeln!(out, "ENDATA");
    Ok(out)
}

fn write_expr(out: &mut String, terms: &[(usize, f64)], vars: &[String]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (i, &(j, c)) in terms.iter().enumerate() {
        let sign = if c < 0.0 { "-" } else { "+" };
        if i == 0 && c >= 0.0 {
            let _ = write!(out, " {} {}", num(c), vars[j]);
        } else {
            let _ = write!(out, " {sign} {} {}", num(c.abs()), vars[j]);
        }
    }
}

fn write_lp(mip: &MixedIntegerProgram) -> Result<String> {
    let lp = &mip.base;
    let nm = names(lp)?;
    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", sanitize_name(&lp.name));
    let _ = writeln!(
        out,
        "{}",
        match lp.objective.sense {
            Sense::Minimize => "Minimize",
            Sense::Maximize => "Maximize",
        }
    );
    let obj: Vec<(usize, f64)> = lp
        .objective_vector()
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c != 0.0)
        .collect();
    let _ = write!(out, " {}:", nm.obj);
    write_expr(&mut out, &obj, &nm.vars);
    let k = lp.objective.constant;
    if k != 0.0 {
        let _ = write!(out, " {} {}", if k < 0.0 { "-" } else { "+" }, num(k.abs()));
    }
    out.push('\n');

    let _ = writeln!(out, "Subject To");
    for (c, name) in lp.constraints.iter().zip(&nm.rows) {
        let _ = write!(out, " {name}:");
        let (lo, hi) = (c.lower, c.upper);
        if lo == hi {
            write_expr(&mut out, &c.coeffs, &nm.vars);
            let _ = writeln!(out, " = {}", num(hi));
        } else if lo == -INF && hi != INF {
            write_expr(&mut out, &c.coeffs, &nm.vars);
            let _ = writeln!(out, " <= {}", num(hi));
        } else if hi == INF && lo != -INF {
            write_expr(&mut out, &c.coeffs, &nm.vars);
            let _ = writeln!(out, " >= {}", num(lo));
        } else {
            let _ = write!(out, " {} <=", num(lo));
            write_expr(&mut out, &c.coeffs, &nm.vars);
            let _ = writeln!(out, " <= {}", num(hi));
        }
    }

    let _ = writeln!(out, "Bounds");
    for (j, v) in lp.variables.iter().enumerate() {
        let (lo, hi) = (v.lower, v.upper);
        let default = (lo == 0.0 && hi == INF) || (mip.is_binary(j) && lo == 0.0 && hi == 1.0);
        if default {
            continue;
        }
        let var = &nm.vars[j];
        if lo == -INF && hi == INF {
            let _ = writeln!(out, " {var} free");
        } else if lo == hi {
            let _ = writeln!(out, " {var} = {}", num(lo));
        } else {
            let _ = writeln!(out, " {} <= {var} <= {}", num(lo), num(hi));
        }
    }
    if !mip.binaries.is_empty() {
        let _ = writeln!(out, "Binary");
        for &j in &mip.binaries {
            let _ = writeln!(out, " {}", nm.vars[j]);
        }
    }
    let _ = writeln!(out, "End");
    Ok(out)
}

pub fn import_model(text: &str, format: ModelFormat) -> Result<MixedIntegerProgram> {
    let mip = match format {
        ModelFormat::Mps => read_mps(text)?,
        ModelFormat::LpText => read_lp(text)?,
    };
    mip.validate()?;
    Ok(mip)
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num(tok: &str, line: usize) -> Result<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Ok(INF),
        "-inf" | "-infinity" => Ok(-INF),
        _ => tok
            .parse::<f64>()
            .map_err(|_| perr(line, format!("expected a number, found `{tok}`"))),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum RowKind {
    N,
    E,
    L,
    G,
}

fn read_mps(text: &str) -> Result<MixedIntegerProgram> {
    #[derive(PartialEq, Clone, Copy)]
    enum Sec {
        None,
        ObjSense,
        Rows,
        Columns,
        Rhs,
        Ranges,
        Bounds,
    }
    let mut lp = LinearProgram::new("", Sense::Minimize);
    let mut binaries: Vec<usize> = Vec::new();
    let mut integers: Vec<usize> = Vec::new();
    let mut obj_row: Option<String> = None;
    let mut row_pos: HashMap<String, usize> = HashMap::new();
    let mut kinds: Vec<RowKind> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut ranges: Vec<Option<f64>> = Vec::new();
    let mut var_pos: HashMap<String, usize> = HashMap::new();
    let mut in_int = false;
    let mut sec = Sec::None;
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(char::is_whitespace) {
            sec = match toks[0] {
                "NAME" => {
                    lp.name = toks.get(1).copied().unwrap_or("").to_string();
                    Sec::None
                }
                "OBJSENSE" => {
                    if let Some(s) = toks.get(1) {
                        lp.objective.sense = parse_sense(s, line)?;
                        Sec::None
                    } else {
                        Sec::ObjSense
                    }
                }
                "ROWS" => Sec::Rows,
                "COLUMNS" => Sec::Columns,
                "RHS" => Sec::Rhs,
                "RANGES" => Sec::Ranges,
                "BOUNDS" => Sec::Bounds,
                "ENDATA" => {
                    ended = true;
                    break;
                }
                other => return Err(perr(line, format!("unknown section `{other}`"))),
            };
            continue;
        }
        match sec {
            Sec::None => return Err(perr(line, "data line outside a section")),
            Sec::ObjSense => {
                lp.objective.sense = parse_sense(toks[0], line)?;
            }
            Sec::Rows => {
                if toks.len() != 2 {
                    return Err(perr(line, "ROWS record needs a type and a name"));
                }
                let kind = match toks[0] {
                    "N" => RowKind::N,
                    "E" => RowKind::E,
                    "L" => RowKind::L,
                    "G" => RowKind::G,
                    other => return Err(perr(line, format!("unknown row type `{other}`"))),
                };
                let name = toks[1].to_string();
                if kind == RowKind::N && obj_row.is_none() {
                    obj_row = Some(name);
                    continue;
                }
                if row_pos.contains_key(&name) || obj_row.as_deref() == Some(name.as_str()) {
                    return Err(perr(line, format!("duplicate row `{name}`")));
                }
                row_pos.insert(name.clone(), lp.constraints.len());
                lp.add_constraint(name, Vec::new(), -INF, INF);
                kinds.push(kind);
                rhs.push(0.0);
                ranges.push(None);
            }
            Sec::Columns => {
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    match toks[2] {
                        "'INTORG'" => in_int = true,
                        "'INTEND'" => in_int = false,
                        other => return Err(perr(line, format!("unknown marker `{other}`"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(perr(line, "COLUMNS record needs 3 or 5 fields"));
                }
                let name = toks[0];
                let j = match var_pos.get(name) {
                    Some(&j) => j,
                    None => {
                        let j = lp.add_var(name, 0.0, INF);
                        var_pos.insert(name.to_string(), j);
                        if in_int {
                            integers.push(j);
                        }
                        j
                    }
                };
                for pair in toks[1..].chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        lp.objective.coeffs.push((j, v));
                    } else if let Some(&r) = row_pos.get(pair[0]) {
                        lp.constraints[r].coeffs.push((j, v));
                    } else {
                        return Err(perr(line, format!("unknown row `{}`", pair[0])));
                    }
                }
            }
            Sec::Rhs | Sec::Ranges => {
                let fields = if toks.len() % 2 == 1 { &toks[1..] } else { &toks[..] };
                if fields.is_empty() || fields.len() % 2 != 0 {
                    return Err(perr(line, "malformed RHS/RANGES record"));
                }
                for pair in fields.chunks(2) {
                    let v = parse_num(pair[1], line)?;
                    if obj_row.as_deref() == Some(pair[0]) {
                        if sec == Sec::Rhs {
                            lp.objective.constant = -v;
                        }
                        continue;
                    }
                    let Some(&r) = row_pos.get(pair[0]) else {
                        return Err(perr(line, format!("unknown row `{}`", pair[0])));
                    };
                    if sec == Sec::Rhs {
                        rhs[r] = v;
                    } else {
                        ranges[r] = Some(v);
                    }
                }
            }
            Sec::Bounds => {
                if toks.len() < 3 {
                    return Err(perr(line, "BOUNDS record needs type, set and column"));
                }
                let Some(&j) = var_pos.get(toks[2]) else {
                    return Err(perr(line, format!("unknown column `{}`", toks[2])));
                };
                let val = || -> Result<f64> {
                    let t = toks.get(3).ok_or_else(|| perr(line, "bound value missing"))?;
                    parse_num(t, line)
                };
                let v = &mut lp.variables[j];
                match toks[0] {
                    "UP" => v.upper = val()?,
                    "LO" => v.lower = val()?,
                    "FX" => {
                        let x = val()?;
                        v.lower = x;
                        v.upper = x;
                    }
                    "FR" => {
                        v.lower = -INF;
                        v.upper = INF;
                    }
                    "MI" => v.lower = -INF,
                    "PL" => v.upper = INF,
                    "BV" => {
                        v.lower = 0.0;
                        v.upper = 1.0;
                        if !integers.contains(&j) {
                            integers.push(j);
                        }
                    }
                    other => return Err(perr(line, format!("unsupported bound type `{other}`"))),
                }
            }
        }
    }
    if !ended {
        return Err(perr(text.lines().count(), "missing ENDATA"));
    }
    if obj_row.is_none() {
        return Err(perr(0, "no objective (N) row"));
    }
    for (r, c) in lp.constraints.iter_mut().enumerate() {
        let b = rhs[r];
        let (lo, hi) = match (kinds[r], ranges[r]) {
            (RowKind::N, _) => (-INF, INF),
            (RowKind::E, None) => (b, b),
            (RowKind::E, Some(rg)) if rg >= 0.0 => (b, b + rg),
            (RowKind::E, Some(rg)) => (b + rg, b),
            (RowKind::L, None) => (-INF, b),
            (RowKind::L, Some(rg)) => (b - rg.abs(), b),
            (RowKind::G, None) => (b, INF),
            (RowKind::G, Some(rg)) => (b, b + rg.abs()),
        };
        c.lower = lo;
        c.upper = hi;
    }
    for &j in &integers {
        let v = &lp.variables[j];
        if v.lower < 0.0 || v.upper > 1.0 {
            return Err(Error::Model(format!(
                "integer column `{}` is not binary; general integers are unsupported",
                v.name
            )));
        }
        binaries.push(j);
    }
    binaries.sort_unstable();
    binaries.dedup();
    Ok(MixedIntegerProgram { base: lp, binaries })
}

fn parse_sense(tok: &str, line: usize) -> Result<Sense> {
    match tok.to_ascii_uppercase().as_str() {
        "MIN" | "MINIMIZE" => Ok(Sense::Minimize),
        "MAX" | "MAXIMIZE" => Ok(Sense::Maximize),
        other => Err(perr(line, format!("unknown objective sense `{other}`"))),
    }
}

/// Parses `[±] [coef] name` terms and bare constants. Returns the terms
/// and the summed constant.
fn parse_expr(
    toks: &[&str],
    line: usize,
    lp: &mut LinearProgram,
    vars: &mut HashMap<String, usize>,
) -> Result<(Vec<(usize, f64)>, f64)> {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut i = 0;
    while i < toks.len() {
        let mut sign = 1.0;
        while i < toks.len() && (toks[i] == "+" || toks[i] == "-") {
            if toks[i] == "-" {
                sign = -sign;
            }
            i += 1;
        }
        if i >= toks.len() {
            return Err(perr(line, "dangling sign in expression"));
        }
        let mut coef = 1.0;
        let mut has_coef = false;
        if let Ok(v) = parse_num(toks[i], line) {
            coef = v;
            has_coef = true;
            i += 1;
        }
        let next_is_name = i < toks.len() && toks[i] != "+" && toks[i] != "-";
        if next_is_name {
            let name = toks[i];
            if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(perr(line, format!("invalid name `{name}`")));
            }
            let j = *vars
                .entry(name.to_string())
                .or_insert_with(|| lp.add_var(name, 0.0, INF));
            terms.push((j, sign * coef));
            i += 1;
        } else if has_coef {
            constant += sign * coef;
        } else {
            return Err(perr(line, "empty term"));
        }
    }
    Ok((terms, constant))
}

fn read_lp(text: &str) -> Result<MixedIntegerProgram> {
    #[derive(PartialEq)]
    enum Sec {
        Start,
        Objective,
        Constraints,
        Bounds,
        Binary,
        End,
    }
    let mut lp = LinearProgram::new("", Sense::Minimize);
    let mut vars: HashMap<String, usize> = HashMap::new();
    let mut bins: Vec<usize> = Vec::new();
    let mut sec = Sec::Start;
    let mut seen_objective = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix('\\') {
            if lp.name.is_empty() && sec == Sec::Start {
                lp.name = rest.trim().to_string();
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let lower = trimmed.to_ascii_lowercase();
        let header = match lower.as_str() {
            "maximize" | "maximise" | "max" => Some(Sec::Objective).inspect(|_| {
                lp.objective.sense = Sense::Maximize;
            }),
            "minimize" | "minimise" | "min" => Some(Sec::Objective).inspect(|_| {
                lp.objective.sense = Sense::Minimize;
            }),
            "subject to" | "such that" | "st" | "s.t." => Some(Sec::Constraints),
            "bounds" => Some(Sec::Bounds),
            "binary" | "binaries" | "bin" => Some(Sec::Binary),
            "end" => Some(Sec::End),
            _ => None,
        };
        if let Some(h) = header {
            sec = h;
            continue;
        }
        let (label, body) = match trimmed.split_once(':') {
            Some((l, b)) => (Some(l.trim()), b),
            None => (None, trimmed),
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        match sec {
            Sec::Start | Sec::End => return Err(perr(line, "content outside a block")),
            Sec::Objective => {
                if seen_objective {
                    return Err(perr(line, "objective must be on one line"));
                }
                seen_objective = true;
                let (terms, constant) = parse_expr(&toks, line, &mut lp, &mut vars)?;
                lp.objective.coeffs = terms;
                lp.objective.constant = constant;
            }
            Sec::Constraints => {
                let name = label.ok_or_else(|| perr(line, "constraint needs a name"))?;
                let ops: Vec<usize> = toks
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| matches!(**t, "<=" | ">=" | "=" | "<" | ">" | "=<" | "=>"))
                    .map(|(i, _)| i)
                    .collect();
                let (lo, hi, expr) = match ops.as_slice() {
                    [k] => {
                        let rhs_toks = &toks[k + 1..];
                        if rhs_toks.len() != 1 {
                            return Err(perr(line, "right-hand side must be one number"));
                        }
                        let v = parse_num(rhs_toks[0], line)?;
                        let (lo, hi) = match toks[*k] {
                            "<=" | "<" | "=<" => (-INF, v),
                            ">=" | ">" | "=>" => (v, INF),
                            _ => (v, v),
                        };
                        (lo, hi, &toks[..*k])
                    }
                    [a, b] => {
                        if *a != 1 || *b != toks.len() - 2 {
                            return Err(perr(line, "ranged row must read `lo <= expr <= hi`"));
                        }
                        let lo = parse_num(toks[0], line)?;
                        let hi = parse_num(toks[b + 1], line)?;
                        (lo, hi, &toks[a + 1..*b])
                    }
                    _ => return Err(perr(line, "constraint needs one or two comparison operators")),
                };
                let (terms, constant) = parse_expr(expr, line, &mut lp, &mut vars)?;
                lp.add_constraint(name, terms, lo - constant, hi - constant);
            }
            Sec::Bounds => {
                let get = |name: &str, vars: &HashMap<String, usize>| {
                    vars.get(name)
                        .copied()
                        .ok_or_else(|| perr(line, format!("bound on unknown variable `{name}`")))
                };
                match toks.as_slice() {
                    [name, kw] if kw.eq_ignore_ascii_case("free") => {
                        let j = get(name, &vars)?;
                        lp.variables[j].lower = -INF;
                        lp.variables[j].upper = INF;
                    }
                    [name, "=", v] => {
                        let j = get(name, &vars)?;
                        let v = parse_num(v, line)?;
                        lp.variables[j].lower = v;
                        lp.variables[j].upper = v;
                    }
                    [lo, "<=", name, "<=", hi] => {
                        let j = get(name, &vars)?;
                        lp.variables[j].lower = parse_num(lo, line)?;
                        lp.variables[j].upper = parse_num(hi, line)?;
                    }
                    [name, "<=", v] => {
                        let j = get(name, &vars)?;
                        lp.variables[j].upper = parse_num(v, line)?;
                    }
                    [name, ">=", v] => {
                        let j = get(name, &vars)?;
                        lp.variables[j].lower = parse_num(v, line)?;
                    }
                    _ => return Err(perr(line, "unrecognized bound")),
                }
            }
            Sec::Binary => {
                for name in toks {
                    let j = *vars
                        .entry(name.to_string())
                        .or_insert_with(|| lp.add_var(name, 0.0, 1.0));
                    let v = &mut lp.variables[j];
                    if v.lower == 0.0 && v.upper == INF {
                        v.upper = 1.0;
                    }
                    bins.push(j);
                }
            }
        }
    }
    if sec != Sec::End {
        return Err(perr(text.lines().count(), "missing End"));
    }
    bins.sort_unstable();
    bins.dedup();
    Ok(MixedIntegerProgram {
        base: lp,
        binaries: bins,
    })
}
