//! Grid data model: buses, generators and lines with the electrical data the
//! DC load-shed model needs, plus ingestion from the native JSON format and
//! the MATPOWER case subset.
//!
//! Units: demands, generator limits and thermal limits are MW; susceptance
//! is per unit on `base_mva`; angles are radians. A [`Network`] is validated
//! on construction and immutable afterwards.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ANGLE_BOUND_RAD: f64 = std::f64::consts::FRAC_PI_3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coord {
    pub lon: f64,
    pub lat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: String,
    pub demand_mw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coord: Option<Coord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub pmax_mw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Line {
    pub id: String,
    pub from: String,
    pub to: String,
    pub susceptance: f64,
    pub thermal_mw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_diff_max_rad: Option<f64>,
}

/// On-disk layout of a network file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkData {
    pub base_mva: f64,
    pub angle_bound_rad: f64,
    pub buses: Vec<Bus>,
    #[serde(default)]
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub lines: Vec<Line>,
}

/// An interdictable component, by position in the network's tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Line(usize),
    Gen(usize),
}

#[derive(Clone, Debug)]
pub struct Network {
    data: NetworkData,
    bus_pos: HashMap<String, usize>,
    gen_pos: HashMap<String, usize>,
    line_pos: HashMap<String, usize>,
    gen_bus: Vec<usize>,
    line_ends: Vec<(usize, usize)>,
    reference_buses: Vec<usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl Network {
    pub fn new(data: NetworkData) -> Result<Self> {
        if !(data.base_mva.is_finite() && data.base_mva > 0.0) {
            return Err(Error::invariant("network", "base_mva", "must be positive"));
        }
        if !(data.angle_bound_rad.is_finite() && data.angle_bound_rad > 0.0) {
            return Err(Error::invariant("network", "angle_bound_rad", "must be positive"));
        }
        let mut bus_pos = HashMap::new();
        for (i, b) in data.buses.iter().enumerate() {
            if bus_pos.insert(b.id.clone(), i).is_some() {
                return Err(Error::invariant("bus", &b.id, "duplicate id"));
            }
            if !(b.demand_mw.is_finite() && b.demand_mw >= 0.0) {
                return Err(Error::invariant("bus", &b.id, "demand_mw must be finite and >= 0"));
            }
            if let Some(c) = b.coord {
                if !(c.lon.is_finite() && c.lat.is_finite()) {
                    return Err(Error::invariant("bus", &b.id, "coordinates must be finite"));
                }
            }
        }
        let mut gen_pos = HashMap::new();
        let mut gen_bus = Vec::with_capacity(data.generators.len());
        for (i, g) in data.generators.iter().enumerate() {
            if gen_pos.insert(g.id.clone(), i).is_some() {
                return Err(Error::invariant("generator", &g.id, "duplicate id"));
            }
            if !(g.pmax_mw.is_finite() && g.pmax_mw >= 0.0) {
                return Err(Error::invariant("generator", &g.id, "pmax_mw must be finite and >= 0"));
            }
            let Some(&b) = bus_pos.get(&g.bus) else {
                return Err(Error::invariant(
                    "generator",
                    &g.id,
                    format!("unknown bus `{}`", g.bus),
                ));
            };
            gen_bus.push(b);
        }
        let mut line_pos = HashMap::new();
        let mut line_ends = Vec::with_capacity(data.lines.len());
        for (i, l) in data.lines.iter().enumerate() {
            if line_pos.insert(l.id.clone(), i).is_some() {
                return Err(Error::invariant("line", &l.id, "duplicate id"));
            }
            let from = *bus_pos.get(&l.from).ok_or_else(|| {
                Error::invariant("line", &l.id, format!("unknown bus `{}`", l.from))
            })?;
            let to = *bus_pos
                .get(&l.to)
                .ok_or_else(|| Error::invariant("line", &l.id, format!("unknown bus `{}`", l.to)))?;
            if from == to {
                return Err(Error::invariant("line", &l.id, "from and to buses coincide"));
            }
            if !(l.susceptance.is_finite() && l.susceptance != 0.0) {
                return Err(Error::invariant("line", &l.id, "susceptance must be finite and nonzero"));
            }
            if !(l.thermal_mw.is_finite() && l.thermal_mw > 0.0) {
                return Err(Error::invariant("line", &l.id, "thermal_mw must be positive"));
            }
            if let Some(a) = l.angle_diff_max_rad {
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::invariant("line", &l.id, "angle_diff_max_rad must be positive"));
                }
            }
            line_ends.push((from, to));
        }
        let reference_buses = structural_references(&data, &line_ends);
        Ok(Self {
            data,
            bus_pos,
            gen_pos,
            line_pos,
            gen_bus,
            line_ends,
            reference_buses,
        })
    }

    pub fn data(&self) -> &NetworkData {
        &self.data
    }

    pub fn into_data(self) -> NetworkData {
        self.data
    }

    pub fn base_mva(&self) -> f64 {
        self.data.base_mva
    }

    pub fn angle_bound_rad(&self) -> f64 {
        self.data.angle_bound_rad
    }

    pub fn buses(&self) -> &[Bus] {
        &self.data.buses
    }

    pub fn generators(&self) -> &[Generator] {
        &self.data.generators
    }

    pub fn lines(&self) -> &[Line] {
        &self.data.lines
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.bus_pos.get(id).copied()
    }

    pub fn gen_index(&self, id: &str) -> Option<usize> {
        self.gen_pos.get(id).copied()
    }

    pub fn line_index(&self, id: &str) -> Option<usize> {
        self.line_pos.get(id).copied()
    }

    /// Bus position of generator `g`.
    pub fn gen_bus(&self, g: usize) -> usize {
        self.gen_bus[g]
    }

    /// `(from, to)` bus positions of line `l`.
    pub fn line_ends(&self, l: usize) -> (usize, usize) {
        self.line_ends[l]
    }

    /// One angle reference per connected component of the full line graph:
    /// the bus with the lexicographically smallest id.
    pub fn reference_buses(&self) -> &[usize] {
        &self.reference_buses
    }

    pub fn is_reference(&self, b: usize) -> bool {
        self.reference_buses.binary_search(&b).is_ok()
    }

    pub fn total_demand(&self) -> f64 {
        total_demand(self)
    }

    /// Flow capacity of an in-service line in MW: the thermal limit, further
    /// limited by the angle-difference bound through Ohm's law.
    pub fn line_capacity_mw(&self, l: usize) -> f64 {
        let line = &self.data.lines[l];
        let angle = line.angle_diff_max_rad.unwrap_or(self.data.angle_bound_rad);
        line.thermal_mw
            .min(self.data.base_mva * line.susceptance.abs() * angle)
    }

    /// Big-M for the relaxed Ohm's-law rows of an unavailable line, in MW.
    pub fn ohm_big_m(&self, l: usize) -> f64 {
        self.data.base_mva * self.data.lines[l].susceptance.abs() * 2.0 * self.data.angle_bound_rad
    }

    pub fn num_components(&self) -> usize {
        self.data.lines.len() + self.data.generators.len()
    }

    /// Lines then generators, in table order.
    pub fn components(&self) -> impl Iterator<Item = Component> + '_ {
        (0..self.data.lines.len())
            .map(Component::Line)
            .chain((0..self.data.generators.len()).map(Component::Gen))
    }

    pub fn component_id(&self, c: Component) -> &str {
        match c {
            Component::Line(l) => &self.data.lines[l].id,
            Component::Gen(g) => &self.data.generators[g].id,
        }
    }

    pub fn has_all_coords(&self) -> bool {
        self.data.buses.iter().all(|b| b.coord.is_some())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.data).expect("network data always serializes")
    }
}

pub fn total_demand(net: &Network) -> f64 {
    net.buses().iter().map(|b| b.demand_mw).sum()
}

fn structural_references(data: &NetworkData, ends: &[(usize, usize)]) -> Vec<usize> {
    let n = data.buses.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in ends {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut best: HashMap<usize, usize> = HashMap::new();
    for b in 0..n {
        let root = find(&mut parent, b);
        best.entry(root)
            .and_modify(|cur| {
                if data.buses[b].id < data.buses[*cur].id {
                    *cur = b;
                }
            })
            .or_insert(b);
    }
    let mut refs: Vec<usize> = best.into_values().collect();
    refs.sort_unstable();
    refs
}

pub fn parse_network_json(text: &str) -> Result<Network> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let data: NetworkData = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    Network::new(data)
}

pub fn serialize_network_json(net: &Network) -> String {
    net.to_json()
}

pub fn load_network(path: &std::path::Path) -> Result<Network> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_case = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("m"));
    if is_case {
        parse_matpower_case(&text, &MatpowerOptions::default())
    } else {
        parse_network_json(&text)
    }
}

#[derive(Clone, Debug)]
pub struct MatpowerOptions {
    /// Thermal limit in MW for branches with `RATE_A = 0`; defaults to twice
    /// the total demand.
    pub zero_rate_cap_mw: Option<f64>,
    pub angle_bound_rad: f64,
    /// Drop generators and branches whose status column is 0.
    pub honor_status: bool,
}

impl Default for MatpowerOptions {
    fn default() -> Self {
        Self {
            zero_rate_cap_mw: None,
            angle_bound_rad: DEFAULT_ANGLE_BOUND_RAD,
            honor_status: true,
        }
    }
}

// MATPOWER column positions (0-based).
const BUS_I: usize = 0;
const PD: usize = 2;
const GEN_BUS: usize = 0;
const GEN_STATUS: usize = 7;
const PMAX: usize = 8;
const F_BUS: usize = 0;
const T_BUS: usize = 1;
const BR_X: usize = 3;
const RATE_A: usize = 5;
const BR_STATUS: usize = 10;

struct Table {
    rows: Vec<(usize, Vec<f64>)>,
}

impl Table {
    fn cell(&self, row: usize, col: usize, table: &str) -> Result<f64> {
        let (line, values) = &self.rows[row];
        values.get(col).copied().ok_or_else(|| Error::Parse {
            line: *line,
            message: format!("`{table}` row has {} columns, need column {}", values.len(), col + 1),
        })
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('%') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    match tok {
        "Inf" | "inf" => Ok(f64::INFINITY),
        "-Inf" | "-inf" => Ok(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().map_err(|_| Error::Parse {
            line,
            message: format!("non-numeric cell `{tok}`"),
        }),
    }
}

fn scan_case(text: &str) -> Result<(HashMap<String, Table>, HashMap<String, f64>)> {
    let mut tables = HashMap::new();
    let mut scalars = HashMap::new();
    let mut current: Option<(String, Table)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some((_, table)) = current.as_mut() {
            let closes = push_rows(line, lineno, table)?;
            if closes {
                let (name, table) = current.take().expect("inside a table");
                tables.insert(name, table);
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("mpc.") else {
            continue;
        };
        let Some((name, value)) = rest.split_once('=') else {
            continue;
        };
        let name = name.trim().to_string();
        let value = value.trim();
        if let Some(body) = value.strip_prefix('[') {
            let mut table = Table { rows: Vec::new() };
            let closes = push_rows(body, lineno, &mut table)?;
            if closes {
                tables.insert(name, table);
            } else {
                current = Some((name, table));
            }
        } else if !value.starts_with('{') && !value.starts_with('\'') {
            let v = value.trim_end_matches(';').trim();
            if let Ok(x) = v.parse::<f64>() {
                scalars.insert(name, x);
            }
        }
    }
    if let Some((name, _)) = current {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("table `{name}` is not closed"),
        });
    }
    Ok((tables, scalars))
}

/// Appends the rows in `body` to `table`; true when the table closes here.
fn push_rows(body: &str, lineno: usize, table: &mut Table) -> Result<bool> {
    let (body, closes) = match body.find(']') {
        Some(i) => (&body[..i], true),
        None => (body, false),
    };
    for row in body.split(';') {
        let toks: Vec<&str> = row
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if toks.is_empty() {
            continue;
        }
        let vals = toks
            .iter()
            .map(|t| parse_number(t, lineno))
            .collect::<Result<Vec<_>>>()?;
        table.rows.push((lineno, vals));
    }
    Ok(closes)
}

fn fmt_bus_id(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Reads the `bus`, `gen` and `branch` tables and `baseMVA` of a MATPOWER
/// case. Bus ids are the `BUS_I` numbers; generators and lines are named
/// `g<row>` and `l<row>` after their 1-based row in the source table.
pub fn parse_matpower_case(text: &str, opts: &MatpowerOptions) -> Result<Network> {
    let (tables, scalars) = scan_case(text)?;
    let base_mva = *scalars.get("baseMVA").ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing scalar `baseMVA`".into(),
    })?;
    let get = |name: &str| {
        tables.get(name).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing table `{name}`"),
        })
    };
    let bus_t = get("bus")?;
    let gen_t = get("gen")?;
    let br_t = get("branch")?;

    let mut buses = Vec::with_capacity(bus_t.rows.len());
    for r in 0..bus_t.rows.len() {
        buses.push(Bus {
            id: fmt_bus_id(bus_t.cell(r, BUS_I, "bus")?),
            demand_mw: bus_t.cell(r, PD, "bus")?,
            coord: None,
        });
    }
    let total: f64 = buses.iter().map(|b| b.demand_mw).sum();

    let mut generators = Vec::new();
    for r in 0..gen_t.rows.len() {
        let status = gen_t.rows[r].1.get(GEN_STATUS).copied().unwrap_or(1.0);
        if opts.honor_status && status <= 0.0 {
            continue;
        }
        generators.push(Generator {
            id: format!("g{}", r + 1),
            bus: fmt_bus_id(gen_t.cell(r, GEN_BUS, "gen")?),
            pmax_mw: gen_t.cell(r, PMAX, "gen")?.max(0.0),
        });
    }

    let cap = opts.zero_rate_cap_mw.unwrap_or(2.0 * total);
    let mut lines = Vec::new();
    for r in 0..br_t.rows.len() {
        let status = br_t.rows[r].1.get(BR_STATUS).copied().unwrap_or(1.0);
        if opts.honor_status && status <= 0.0 {
            continue;
        }
        let x = br_t.cell(r, BR_X, "branch")?;
        if x == 0.0 {
            return Err(Error::Parse {
                line: br_t.rows[r].0,
                message: "branch reactance BR_X is zero".into(),
            });
        }
        let rate = br_t.cell(r, RATE_A, "branch")?;
        lines.push(Line {
            id: format!("l{}", r + 1),
            from: fmt_bus_id(br_t.cell(r, F_BUS, "branch")?),
            to: fmt_bus_id(br_t.cell(r, T_BUS, "branch")?),
            susceptance: 1.0 / x,
            thermal_mw: if rate > 0.0 { rate } else { cap },
            angle_diff_max_rad: None,
        });
    }

    Network::new(NetworkData {
        base_mva,
        angle_bound_rad: opts.angle_bound_rad,
        buses,
        generators,
        lines,
    })
}

/// Returns a copy of `net` with bus coordinates read from CSV text. The
/// header must name an id column (`id`, `bus_id` or `Bus ID`) and `lat` plus
/// `lon` or `lng`.
pub fn attach_coordinates_csv(net: &Network, text: &str) -> Result<Network> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let find = |names: &[&str]| {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
    };
    let id_col = find(&["id", "bus_id", "bus id"]).ok_or_else(|| Error::Schema {
        path: "header".into(),
        message: "no bus id column".into(),
    })?;
    let lat_col = find(&["lat"]).ok_or_else(|| Error::Schema {
        path: "header".into(),
        message: "no lat column".into(),
    })?;
    let lon_col = find(&["lon", "lng"]).ok_or_else(|| Error::Schema {
        path: "header".into(),
        message: "no lon/lng column".into(),
    })?;
    let mut data = net.data().clone();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let id = rec.get(id_col).unwrap_or_default();
        let num = |col: usize| -> Result<f64> {
            let tok = rec.get(col).unwrap_or_default();
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("non-numeric coordinate `{tok}`"),
            })
        };
        let Some(b) = net.bus_index(id) else {
            return Err(Error::invariant("bus", id, "coordinate row for unknown bus"));
        };
        data.buses[b].coord = Some(Coord {
            lon: num(lon_col)?,
            lat: num(lat_col)?,
        });
    }
    Network::new(data)
}

/// Fills missing bus coordinates with a two-dimensional spectral embedding
/// of the line graph (eigenvectors of the graph Laplacian for the two
/// smallest nonzero eigenvalues). Buses that already have coordinates keep
/// them. Deterministic: eigenvector signs are fixed so that the largest
/// magnitude entry is positive.
pub fn with_spectral_coordinates(net: &Network) -> Result<Network> {
    let n = net.buses().len();
    let mut data = net.data().clone();
    if n == 0 || net.has_all_coords() {
        return Network::new(data);
    }
    let mut lap = nalgebra::DMatrix::<f64>::zeros(n, n);
    for l in 0..net.lines().len() {
        let (a, b) = net.line_ends(l);
        lap[(a, b)] -= 1.0;
        lap[(b, a)] -= 1.0;
        lap[(a, a)] += 1.0;
        lap[(b, b)] += 1.0;
    }
    let eig = nalgebra::SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let pick: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| eig.eigenvalues[i] > 1e-9)
        .take(2)
        .collect();
    let axis = |k: usize| -> Vec<f64> {
        match pick.get(k) {
            Some(&col) => {
                let v: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
                let lead = v
                    .iter()
                    .copied()
                    .fold(0.0f64, |acc, x| if x.abs() > acc.abs() + 1e-12 { x } else { acc });
                if lead < 0.0 {
                    v.into_iter().map(|x| -x).collect()
                } else {
                    v
                }
            }
            None => vec![0.0; n],
        }
    };
    let (xs, ys) = (axis(0), axis(1));
    for (i, bus) in data.buses.iter_mut().enumerate() {
        if bus.coord.is_none() {
            bus.coord = Some(Coord {
                lon: xs[i],
                lat: ys[i],
            });
        }
    }
    Network::new(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"base_mva":100,"angle_bound_rad":1.0,
        "buses":[{"id":"b1","demand_mw":50}],
        "generators":[{"id":"g1","bus":"b1","pmax_mw":80}],
        "lines":[]}"#;

    #[test]
    fn minimal_network() {
        let net = parse_network_json(MINIMAL).unwrap();
        assert_eq!(net.buses().len(), 1);
        assert_eq!(net.lines().len(), 0);
        assert_eq!(net.reference_buses(), &[0]);
    }

    #[test]
    fn dangling_line_endpoint_is_named() {
        let text = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"b1","demand_mw":0}],
            "generators":[],
            "lines":[{"id":"l1","from":"b1","to":"b99","susceptance":10,"thermal_mw":5}]}"#;
        let err = parse_network_json(text).unwrap_err().to_string();
        assert!(err.contains("b99"), "{err}");
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"b1","demand_mw":0,"shunt":3}]}"#;
        let err = parse_network_json(text).unwrap_err();
        match err {
            Error::Schema { path, .. } => assert!(path.starts_with("buses[0]"), "{path}"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn invariant_violations() {
        let bad_line = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"a","demand_mw":0},{"id":"b","demand_mw":0}],
            "lines":[{"id":"l","from":"a","to":"b","susceptance":0,"thermal_mw":5}]}"#;
        assert!(parse_network_json(bad_line).unwrap_err().to_string().contains("`l`"));
        let neg = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"a","demand_mw":-1}]}"#;
        assert!(parse_network_json(neg).is_err());
        let self_loop = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"a","demand_mw":0}],
            "lines":[{"id":"l","from":"a","to":"a","susceptance":1,"thermal_mw":5}]}"#;
        assert!(parse_network_json(self_loop).is_err());
    }

    #[test]
    fn total_demand_sums_buses() {
        let text = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"a","demand_mw":30},{"id":"b","demand_mw":70}]}"#;
        assert_eq!(parse_network_json(text).unwrap().total_demand(), 100.0);
        let zero = r#"{"base_mva":100,"angle_bound_rad":1.0,
            "buses":[{"id":"a","demand_mw":0},{"id":"b","demand_mw":0}]}"#;
        assert_eq!(parse_network_json(zero).unwrap().total_demand(), 0.0);
    }

    const TWO_BUS: &str = "function mpc = two
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	230	1	1.1	0.9;
	2	1	40	0	0	0	1	1	0	230	1	1.1	0.9;
];
mpc.gen = [
	1	0	0	10	-10	1	100	1	100	0;
	2	0	0	10	-10	1	100	0	50	0;
];
mpc.branch = [
	1	2	0.01	0.1	0	0	0	0	0	0	1	-360	360;
];
";

    #[test]
    fn matpower_mapping() {
        let net = parse_matpower_case(TWO_BUS, &MatpowerOptions::default()).unwrap();
        assert_eq!(net.buses().len(), 2);
        assert_eq!(net.generators().len(), 1, "out-of-service generator dropped");
        assert_eq!(net.generators()[0].pmax_mw, 100.0);
        assert!((net.lines()[0].susceptance - 10.0).abs() < 1e-12);
        // RATE_A = 0 gets twice the total demand.
        assert_eq!(net.lines()[0].thermal_mw, 80.0);
        assert_eq!(net.buses()[1].demand_mw, 40.0);
    }

    #[test]
    fn matpower_errors() {
        let zero_x = TWO_BUS.replace("0.01	0.1", "0.01	0");
        assert!(parse_matpower_case(&zero_x, &MatpowerOptions::default()).is_err());
        let no_gen = TWO_BUS.replace("mpc.gen", "mpc.gens");
        let err = parse_matpower_case(&no_gen, &MatpowerOptions::default()).unwrap_err();
        assert!(err.to_string().contains("gen"));
        let bad_cell = TWO_BUS.replace("230	1	1.1", "230	x	1.1");
        match parse_matpower_case(&bad_cell, &MatpowerOptions::default()).unwrap_err() {
            Error::Parse { line, .. } => assert!(line >= 4),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn capacity_includes_angle_limit() {
        let text = r#"{"base_mva":100,"angle_bound_rad":0.5,
            "buses":[{"id":"a","demand_mw":0},{"id":"b","demand_mw":0}],
            "lines":[{"id":"l","from":"a","to":"b","susceptance":2,"thermal_mw":500,"angle_diff_max_rad":0.1}]}"#;
        let net = parse_network_json(text).unwrap();
        assert!((net.line_capacity_mw(0) - 20.0).abs() < 1e-12);
        assert!((net.ohm_big_m(0) - 200.0).abs() < 1e-12);
    }

    #[test]
    fn coordinates_from_csv_and_spectral() {
        let net = parse_matpower_case(TWO_BUS, &MatpowerOptions::default()).unwrap();
        let with = attach_coordinates_csv(&net, "Bus ID,lat,lng\n1,35.1,-106.6\n2,35.2,-106.5\n")
            .unwrap();
        assert!(with.has_all_coords());
        assert_eq!(with.buses()[0].coord.unwrap().lon, -106.6);
        let laid_out = with_spectral_coordinates(&net).unwrap();
        assert!(laid_out.has_all_coords());
        assert_eq!(laid_out, with_spectral_coordinates(&net).unwrap());
    }
}
