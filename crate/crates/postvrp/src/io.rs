//! Instance file formats.
//!
//! Two on-disk formats are supported:
//!
//! * CVRPLib `.vrp` files (the TSPLIB-style capacity benchmark format),
//!   restricted to `EDGE_WEIGHT_TYPE: EUC_2D` with distances rounded to the
//!   nearest integer, as the public benchmark defines them.
//! * A line-oriented `.postvrp` format for route-length-limited instances:
//!   header lines `NAME`, `N`, `RMAX`, then either `DEPOT x y` plus one
//!   `D id x y` line per delivery (unrounded Euclidean distances) or a
//!   `MATRIX` section with n+1 rows of n+1 explicit weights, row 0 being
//!   the depot. `#` starts a comment; blank lines are ignored.
//!
//! Parsers are strict about structure and lenient about whitespace.
//! Serializers write exactly what the parsers accept, so parse → write →
//! parse is stable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::model::{Constraint, Instance};
use crate::{Error, Result};

/// On-disk format of an instance file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Cvrplib,
    Postvrp,
}

/// Structured reading of an instance name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceName {
    /// `<family>-n<nodes>-k<vehicles>`, e.g. `X-n101-k25`. `nodes` counts
    /// the depot; `vehicles` is the name-declared optimal fleet size.
    Cvrplib { family: String, nodes: usize, vehicles: usize },
    /// `<family>_<size>_<id>` (or `-` separated), e.g. `ManhattanPilot_500_2`.
    Sized { family: String, size: usize, id: usize },
    /// Anything else.
    Foreign,
}

/// Lenient name classifier; never fails.
pub fn parse_instance_name(name: &str) -> InstanceName {
    if let Some(parsed) = try_cvrplib_name(name) {
        return parsed;
    }
    for sep in ['_', '-'] {
        let parts: Vec<&str> = name.split(sep).collect();
        if parts.len() >= 3 {
            let id = parts[parts.len() - 1].parse::<usize>();
            let size = parts[parts.len() - 2].parse::<usize>();
            let family = parts[..parts.len() - 2].join(&sep.to_string());
            if let (Ok(size), Ok(id)) = (size, id) {
                if !family.is_empty() {
                    return InstanceName::Sized { family, size, id };
                }
            }
        }
    }
    InstanceName::Foreign
}

fn try_cvrplib_name(name: &str) -> Option<InstanceName> {
    let (rest, k_part) = name.rsplit_once("-k")?;
    let vehicles = k_part.parse::<usize>().ok()?;
    let (family, n_part) = rest.rsplit_once("-n")?;
    let nodes = n_part.parse::<usize>().ok()?;
    if family.is_empty() {
        return None;
    }
    Some(InstanceName::Cvrplib { family: family.to_string(), nodes, vehicles })
}

/// An instance loaded from disk, with whatever its name declares.
#[derive(Debug)]
pub struct InstanceFile {
    pub path: PathBuf,
    pub format: Format,
    /// Node count (depot included) declared by a CVRPLib-style name.
    pub declared_n: Option<usize>,
    /// Fleet size declared by a CVRPLib-style name.
    pub declared_k: Option<usize>,
    pub instance: Instance,
}

impl InstanceFile {
    /// Loads a `.vrp` or `.postvrp` file, choosing the parser by extension.
    pub fn open(path: &Path) -> Result<InstanceFile> {
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("vrp") => Format::Cvrplib,
            Some("postvrp") => Format::Postvrp,
            other => {
                return Err(Error::Unsupported(format!(
                    "unknown instance extension {:?} (expected .vrp or .postvrp)",
                    other.unwrap_or("")
                )))
            }
        };
        let text = std::fs::read_to_string(path)?;
        let instance = match format {
            Format::Cvrplib => parse_cvrplib(&text)?,
            Format::Postvrp => parse_postvrp(&text)?,
        };
        let (declared_n, declared_k) = match parse_instance_name(instance.name()) {
            InstanceName::Cvrplib { nodes, vehicles, .. } => (Some(nodes), Some(vehicles)),
            _ => (None, None),
        };
        Ok(InstanceFile { path: path.to_path_buf(), format, declared_n, declared_k, instance })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Splits a header line into key and value, accepting `KEY : v`, `KEY: v`,
/// and `KEY v`.
fn header_kv(t: &str) -> (String, String) {
    if let Some((k, v)) = t.split_once(':') {
        (k.trim().to_uppercase(), v.trim().to_string())
    } else {
        match t.split_once(char::is_whitespace) {
            Some((k, v)) => (k.trim().to_uppercase(), v.trim().to_string()),
            None => (t.to_uppercase(), String::new()),
        }
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| parse_err(line, format!("expected {what}, got {tok:?}")))
}

/// Parses a CVRPLib EUC_2D capacity instance.
pub fn parse_cvrplib(text: &str) -> Result<Instance> {
    enum Mode {
        Header,
        Coords,
        Demands,
        Depot,
    }
    let mut mode = Mode::Header;
    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut capacity: Option<u64> = None;
    let mut saw_weight_type = false;
    let mut saw_coord_section = false;
    let mut saw_demand_section = false;
    let mut saw_depot_section = false;
    let mut coords: Vec<Option<(f64, f64)>> = Vec::new();
    let mut demands: Vec<Option<u64>> = Vec::new();
    let mut depot_id: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        match t {
            "NODE_COORD_SECTION" => {
                let dim = dimension
                    .ok_or_else(|| parse_err(line, "NODE_COORD_SECTION before DIMENSION"))?;
                coords = vec![None; dim + 1];
                saw_coord_section = true;
                mode = Mode::Coords;
                continue;
            }
            "DEMAND_SECTION" => {
                let dim =
                    dimension.ok_or_else(|| parse_err(line, "DEMAND_SECTION before DIMENSION"))?;
                demands = vec![None; dim + 1];
                saw_demand_section = true;
                mode = Mode::Demands;
                continue;
            }
            "DEPOT_SECTION" => {
                saw_depot_section = true;
                mode = Mode::Depot;
                continue;
            }
            "EOF" => break,
            _ => {}
        }
        match mode {
            Mode::Header => {
                let (key, value) = header_kv(t);
                match key.as_str() {
                    "NAME" => name = Some(value),
                    "DIMENSION" => {
                        dimension = Some(parse_num(&value, line, "integer DIMENSION")?)
                    }
                    "CAPACITY" => capacity = Some(parse_num(&value, line, "integer CAPACITY")?),
                    "EDGE_WEIGHT_TYPE" => {
                        if value != "EUC_2D" {
                            return Err(parse_err(
                                line,
                                format!("EDGE_WEIGHT_TYPE {value:?} unsupported, only EUC_2D"),
                            ));
                        }
                        saw_weight_type = true;
                    }
                    // TYPE, COMMENT and any other annotations are ignored.
                    _ => {}
                }
            }
            Mode::Coords => {
                let mut it = t.split_whitespace();
                let id: usize = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "empty coordinate line"))?,
                    line,
                    "node id",
                )?;
                if id == 0 || id >= coords.len() {
                    return Err(parse_err(line, format!("node id {id} outside 1..=DIMENSION")));
                }
                let x: f64 = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "missing x coordinate"))?,
                    line,
                    "x coordinate",
                )?;
                let y: f64 = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "missing y coordinate"))?,
                    line,
                    "y coordinate",
                )?;
                if it.next().is_some() {
                    return Err(parse_err(line, "trailing tokens on coordinate line"));
                }
                if coords[id].replace((x, y)).is_some() {
                    return Err(parse_err(line, format!("duplicate coordinates for node {id}")));
                }
            }
            Mode::Demands => {
                let mut it = t.split_whitespace();
                let id: usize = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "empty demand line"))?,
                    line,
                    "node id",
                )?;
                if id == 0 || id >= demands.len() {
                    return Err(parse_err(line, format!("node id {id} outside 1..=DIMENSION")));
                }
                let d: u64 = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "missing demand value"))?,
                    line,
                    "demand",
                )?;
                if demands[id].replace(d).is_some() {
                    return Err(parse_err(line, format!("duplicate demand for node {id}")));
                }
            }
            Mode::Depot => {
                let v: i64 = parse_num(t, line, "depot id or -1")?;
                if v == -1 {
                    mode = Mode::Header;
                } else if v <= 0 {
                    return Err(parse_err(line, format!("invalid depot id {v}")));
                } else if depot_id.replace(v as usize).is_some() {
                    return Err(parse_err(line, "multiple depots are not supported"));
                }
            }
        }
    }

    let name = name.ok_or_else(|| parse_err(0, "missing NAME header"))?;
    let dimension = dimension.ok_or_else(|| parse_err(0, "missing DIMENSION header"))?;
    let capacity = capacity.ok_or_else(|| parse_err(0, "missing CAPACITY header"))?;
    if !saw_weight_type {
        return Err(parse_err(0, "missing EDGE_WEIGHT_TYPE header"));
    }
    if !saw_coord_section {
        return Err(parse_err(0, "missing NODE_COORD_SECTION"));
    }
    if !saw_demand_section {
        return Err(parse_err(0, "missing DEMAND_SECTION"));
    }
    if !saw_depot_section {
        return Err(parse_err(0, "missing DEPOT_SECTION"));
    }
    let depot_id = depot_id.ok_or_else(|| parse_err(0, "DEPOT_SECTION lists no depot"))?;
    if depot_id > dimension {
        return Err(parse_err(0, format!("depot id {depot_id} outside 1..=DIMENSION")));
    }
    for id in 1..=dimension {
        if coords[id].is_none() {
            return Err(parse_err(0, format!("node {id} has no coordinates")));
        }
        if demands[id].is_none() {
            return Err(parse_err(0, format!("node {id} has no demand")));
        }
    }
    if demands[depot_id] != Some(0) {
        return Err(parse_err(0, format!("depot node {depot_id} must have demand 0")));
    }

    let depot = coords[depot_id].unwrap();
    let mut points = Vec::with_capacity(dimension - 1);
    let mut delivery_demands = Vec::with_capacity(dimension - 1);
    for id in 1..=dimension {
        if id == depot_id {
            continue;
        }
        let (x, y) = coords[id].unwrap();
        points.push((id as u64, x, y));
        delivery_demands.push(demands[id].unwrap());
    }
    let mut inst = Instance::from_points(
        &name,
        depot,
        &points,
        Some(&delivery_demands),
        true,
        Constraint::Capacity(capacity),
    )?;
    inst.set_depot_label(depot_id as u64);
    Ok(inst)
}

/// Serializes a capacity instance with coordinates back to CVRPLib text.
pub fn write_cvrplib(inst: &Instance) -> Result<String> {
    let q = match inst.constraint() {
        Constraint::Capacity(q) => q,
        Constraint::MaxRouteLength(_) => {
            return Err(Error::Unsupported(
                "CVRPLib files carry capacity instances only".into(),
            ))
        }
    };
    let coords = inst.coords().ok_or_else(|| {
        Error::Unsupported("CVRPLib files need coordinates, instance has a matrix".into())
    })?;
    // The format identifies nodes by their labels, so they must be usable
    // ids: positive and distinct. Constructors default the depot label to
    // 0; set_depot_label before serializing such instances.
    let mut labels: Vec<u64> = (0..=inst.num_deliveries()).map(|v| inst.label(v)).collect();
    labels.sort_unstable();
    if labels[0] == 0 || labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Unsupported(
            "CVRPLib serialization needs positive, distinct node labels".into(),
        ));
    }
    let mut out = String::new();
    let _ = writeln!(out, "NAME : {}", inst.name());
    let _ = writeln!(out, "TYPE : CVRP");
    let _ = writeln!(out, "DIMENSION : {}", inst.num_deliveries() + 1);
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
    let _ = writeln!(out, "CAPACITY : {q}");
    let _ = writeln!(out, "NODE_COORD_SECTION");
    for node in 0..=inst.num_deliveries() {
        let (x, y) = coords[node];
        let _ = writeln!(out, "{} {} {}", inst.label(node), fmt_f64(x), fmt_f64(y));
    }
    let _ = writeln!(out, "DEMAND_SECTION");
    let _ = writeln!(out, "{} 0", inst.label(0));
    for d in inst.deliveries() {
        let _ = writeln!(out, "{} {}", inst.label(d), inst.demand(d));
    }
    let _ = writeln!(out, "DEPOT_SECTION");
    let _ = writeln!(out, "{}", inst.label(0));
    let _ = writeln!(out, "-1");
    let _ = writeln!(out, "EOF");
    Ok(out)
}

/// Shortest decimal that parses back to the same f64; integers drop the dot.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Parses the route-length-limited format described in the module docs.
pub fn parse_postvrp(text: &str) -> Result<Instance> {
    let mut name: Option<String> = None;
    let mut n: Option<usize> = None;
    let mut r_max: Option<f64> = None;
    let mut depot: Option<(f64, f64)> = None;
    let mut points: Vec<(u64, f64, f64)> = Vec::new();
    let mut matrix_rows: Vec<Vec<f64>> = Vec::new();
    let mut in_matrix = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = match raw.find('#') {
            Some(pos) => raw[..pos].trim(),
            None => raw.trim(),
        };
        if t.is_empty() {
            continue;
        }
        if in_matrix {
            let row: Vec<f64> = t
                .split_whitespace()
                .map(|tok| parse_num(tok, line, "matrix weight"))
                .collect::<Result<_>>()?;
            matrix_rows.push(row);
            continue;
        }
        let mut it = t.split_whitespace();
        let key = it.next().unwrap().to_uppercase();
        match key.as_str() {
            "NAME" => {
                name = Some(it.collect::<Vec<_>>().join(" "));
            }
            "N" => {
                let tok = it.next().ok_or_else(|| parse_err(line, "N needs a value"))?;
                n = Some(parse_num(tok, line, "integer N")?);
            }
            "RMAX" => {
                let tok = it.next().ok_or_else(|| parse_err(line, "RMAX needs a value"))?;
                r_max = Some(parse_num(tok, line, "numeric RMAX")?);
            }
            "DEPOT" => {
                let x = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "DEPOT needs x y"))?,
                    line,
                    "depot x",
                )?;
                let y = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "DEPOT needs x y"))?,
                    line,
                    "depot y",
                )?;
                if depot.replace((x, y)).is_some() {
                    return Err(parse_err(line, "duplicate DEPOT line"));
                }
            }
            "D" => {
                let id = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "D needs id x y"))?,
                    line,
                    "delivery id",
                )?;
                let x = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "D needs id x y"))?,
                    line,
                    "delivery x",
                )?;
                let y = parse_num(
                    it.next().ok_or_else(|| parse_err(line, "D needs id x y"))?,
                    line,
                    "delivery y",
                )?;
                points.push((id, x, y));
            }
            "MATRIX" => in_matrix = true,
            other => {
                return Err(parse_err(line, format!("unrecognized line starting with {other:?}")))
            }
        }
    }

    let name = name.ok_or_else(|| parse_err(0, "missing NAME line"))?;
    let n = n.ok_or_else(|| parse_err(0, "missing N line"))?;
    if n == 0 {
        return Err(parse_err(0, "instance declares no deliveries"));
    }
    let r_max = r_max.ok_or_else(|| parse_err(0, "missing RMAX line"))?;
    let constraint = Constraint::MaxRouteLength(r_max);

    if !matrix_rows.is_empty() {
        if depot.is_some() || !points.is_empty() {
            return Err(parse_err(0, "MATRIX and coordinate lines are mutually exclusive"));
        }
        let side = n + 1;
        if matrix_rows.len() != side {
            return Err(parse_err(
                0,
                format!("MATRIX has {} rows, expected {side}", matrix_rows.len()),
            ));
        }
        let mut flat = Vec::with_capacity(side * side);
        for (i, row) in matrix_rows.iter().enumerate() {
            if row.len() != side {
                return Err(parse_err(
                    0,
                    format!("MATRIX row {i} has {} entries, expected {side}", row.len()),
                ));
            }
            flat.extend_from_slice(row);
        }
        return Instance::from_matrix(&name, n, flat, None, constraint);
    }

    let depot = depot.ok_or_else(|| parse_err(0, "missing DEPOT line"))?;
    if points.len() != n {
        return Err(parse_err(
            0,
            format!("{} delivery lines for N {n}", points.len()),
        ));
    }
    Instance::from_points(&name, depot, &points, None, false, constraint)
}

/// Serializes a route-length-limited instance back to `.postvrp` text.
pub fn write_postvrp(inst: &Instance) -> Result<String> {
    let r_max = match inst.constraint() {
        Constraint::MaxRouteLength(r) => r,
        Constraint::Capacity(_) => {
            return Err(Error::Unsupported(
                ".postvrp files carry route-length-limited instances only".into(),
            ))
        }
    };
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", inst.name());
    let _ = writeln!(out, "N {}", inst.num_deliveries());
    let _ = writeln!(out, "RMAX {}", fmt_f64(r_max));
    match inst.coords() {
        Some(coords) => {
            let (x, y) = coords[0];
            let _ = writeln!(out, "DEPOT {} {}", fmt_f64(x), fmt_f64(y));
            for d in inst.deliveries() {
                let (x, y) = coords[d];
                let _ = writeln!(out, "D {} {} {}", inst.label(d), fmt_f64(x), fmt_f64(y));
            }
        }
        None => {
            let _ = writeln!(out, "MATRIX");
            for a in 0..=inst.num_deliveries() {
                let row: Vec<String> =
                    (0..=inst.num_deliveries()).map(|b| fmt_f64(inst.w(a, b))).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    Ok(out)
}
