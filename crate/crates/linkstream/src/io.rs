//! File formats: CSV stream and event files, the JSON domain
//! configuration, and the CSV coefficient table.
//!
//! All formats are UTF-8 with `,` separators and `.` decimal points; the
//! header row identifies the schema. Numbers are emitted with 17
//! significant digits so every f64 round-trips losslessly.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::EdgeEventSet;
use crate::grid::TimeGrid;
use crate::space::RelationSpace;
use crate::stream::LinkStream;
use crate::transform::{Atom, FsCoefficients, StructuralDictionary};

const INSTANT_HEADER: &str = "t,u,v,w";
const INTERVAL_HEADER: &str = "t_begin,t_end,u,v,w";
const COEFF_HEADER: &str = "f_index,block_i,atom,re,im";

/// Lossless decimal rendering of an f64 (17 significant digits).
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Declarative description of the domain: time bounds, sample count, the
/// ordered relation list (which fixes the relation indexing), and the
/// optional structural dictionary and filter gains.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    pub relations: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainsConfig>,
}

/// Per-atom filter gains as stored in configuration files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GainsConfig {
    pub sigma: Vec<f64>,
    pub nu: Vec<Vec<f64>>,
}

impl DomainConfig {
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let config: DomainConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        TimeGrid::new(self.t_start, self.t_end, self.samples)?;
        let space = self.space()?;
        if let Some(dict) = &self.dictionary {
            StructuralDictionary::new(dict.clone(), space.num_relations())?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_start, self.t_end, self.samples)
    }

    /// Nodes are collected from the relation list in first-appearance
    /// order; the relation order defines the relation indexing.
    pub fn space(&self) -> Result<RelationSpace> {
        if self.relations.is_empty() {
            return Err(Error::InvalidConfig("no relations declared".into()));
        }
        RelationSpace::from_pairs(&self.relations)
    }

    pub fn structural_dictionary(&self) -> Result<Option<StructuralDictionary>> {
        match &self.dictionary {
            Some(blocks) => Ok(Some(StructuralDictionary::new(
                blocks.clone(),
                self.relations.len(),
            )?)),
            None => Ok(None),
        }
    }
}

fn parse_err(label: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: label.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_number(field: &str, label: &str, line: usize, what: &str) -> Result<f64> {
    let x: f64 = field
        .parse()
        .map_err(|_| parse_err(label, line, format!("invalid {what} {field:?}")))?;
    if !x.is_finite() {
        return Err(parse_err(label, line, format!("non-finite {what} {field:?}")));
    }
    Ok(x)
}

enum Schema {
    Instant,
    Interval,
}

fn read_header(lines: &mut impl Iterator<Item = (usize, String)>, label: &str) -> Result<Schema> {
    match lines.next() {
        Some((_, h)) if h == INSTANT_HEADER => Ok(Schema::Instant),
        Some((_, h)) if h == INTERVAL_HEADER => Ok(Schema::Interval),
        Some((n, h)) => Err(parse_err(
            label,
            n,
            format!("unrecognized header {h:?}; expected {INSTANT_HEADER:?} or {INTERVAL_HEADER:?}"),
        )),
        None => Err(parse_err(label, 1, "empty file")),
    }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, String)> + '_ {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').to_string()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses a stream file against a domain configuration.
///
/// Instantaneous rows deposit their weight into the enclosing sample;
/// interval rows paint `w x coverage fraction` across the overlapped
/// samples. Rows referencing unknown relations, out-of-range times,
/// non-finite weights or reversed intervals are rejected with their line
/// number.
pub fn parse_stream<P: AsRef<Path>>(path: P, config: &DomainConfig) -> Result<LinkStream> {
    let label = path.as_ref().display().to_string();
    let text = fs::read_to_string(&path)?;
    parse_stream_str(&text, &label, config)
}

pub fn parse_stream_str(text: &str, label: &str, config: &DomainConfig) -> Result<LinkStream> {
    let grid = config.grid()?;
    let space = config.space()?;
    let mut lines = numbered_lines(text);
    let schema = read_header(&mut lines, label)?;
    let mut weights = Array2::zeros((grid.len(), space.num_relations()));
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        match schema {
            Schema::Instant => {
                if fields.len() != 4 {
                    return Err(parse_err(label, n, format!("expected 4 fields, got {}", fields.len())));
                }
                let t = parse_number(fields[0], label, n, "time")?;
                let w = parse_number(fields[3], label, n, "weight")?;
                let k = space
                    .relation_id(fields[1], fields[2])
                    .map_err(|e| parse_err(label, n, e.to_string()))?;
                let bin = grid.bin_of(t).map_err(|e| parse_err(label, n, e.to_string()))?;
                weights[(bin, k)] += w;
            }
            Schema::Interval => {
                if fields.len() != 5 {
                    return Err(parse_err(label, n, format!("expected 5 fields, got {}", fields.len())));
                }
                let begin = parse_number(fields[0], label, n, "interval begin")?;
                let end = parse_number(fields[1], label, n, "interval end")?;
                if end <= begin {
                    return Err(parse_err(label, n, format!("reversed interval [{begin}, {end}]")));
                }
                let w = parse_number(fields[4], label, n, "weight")?;
                let k = space
                    .relation_id(fields[2], fields[3])
                    .map_err(|e| parse_err(label, n, e.to_string()))?;
                let first = grid.bin_of(begin).map_err(|e| parse_err(label, n, e.to_string()))?;
                let last = grid.bin_of(end).map_err(|e| parse_err(label, n, e.to_string()))?;
                for bin in first..=last {
                    let c = grid.coverage(bin, begin, end);
                    if c > 0.0 {
                        weights[(bin, k)] += w * c;
                    }
                }
            }
        }
    }
    LinkStream::new(grid, space, weights)
}

/// Renders a stream as interval rows: one row per maximal constant-weight
/// run per relation, zero runs omitted. The zero stream renders as the
/// header only.
pub fn stream_to_string(stream: &LinkStream) -> String {
    let grid = stream.grid();
    let space = stream.space();
    let mut out = String::from(INTERVAL_HEADER);
    out.push('\n');
    for k in 0..space.num_relations() {
        let (u, v) = space.relation_names(k);
        let mut j = 0;
        while j < grid.len() {
            let w = stream.weight(j, k);
            let mut end = j + 1;
            while end < grid.len() && stream.weight(end, k) == w {
                end += 1;
            }
            if w != 0.0 {
                out.push_str(&format!(
                    "{},{},{u},{v},{}\n",
                    format_float(grid.edge(j)),
                    format_float(grid.edge(end)),
                    format_float(w)
                ));
            }
            j = end;
        }
    }
    out
}

pub fn write_stream<P: AsRef<Path>>(stream: &LinkStream, path: P) -> Result<()> {
    fs::write(path, stream_to_string(stream))?;
    Ok(())
}

/// Parses an event-set file (interval schema, weights must be positive
/// and are otherwise ignored). The time domain is the hull of the
/// intervals; use [`parse_event_set_with_domain`] to pin it explicitly.
pub fn parse_event_set<P: AsRef<Path>>(path: P) -> Result<EdgeEventSet> {
    let label = path.as_ref().display().to_string();
    let text = fs::read_to_string(&path)?;
    parse_event_set_str(&text, &label, None)
}

pub fn parse_event_set_with_domain<P: AsRef<Path>>(
    path: P,
    t_start: f64,
    t_end: f64,
) -> Result<EdgeEventSet> {
    let label = path.as_ref().display().to_string();
    let text = fs::read_to_string(&path)?;
    parse_event_set_str(&text, &label, Some((t_start, t_end)))
}

pub fn parse_event_set_str(
    text: &str,
    label: &str,
    domain: Option<(f64, f64)>,
) -> Result<EdgeEventSet> {
    let mut lines = numbered_lines(text);
    match read_header(&mut lines, label)? {
        Schema::Interval => {}
        Schema::Instant => {
            return Err(parse_err(
                label,
                1,
                "event sets use the interval schema t_begin,t_end,u,v,w",
            ))
        }
    }
    let mut nodes: Vec<String> = Vec::new();
    let mut links: Vec<(f64, f64, String, String)> = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(label, n, format!("expected 5 fields, got {}", fields.len())));
        }
        let begin = parse_number(fields[0], label, n, "interval begin")?;
        let end = parse_number(fields[1], label, n, "interval end")?;
        if end <= begin {
            return Err(parse_err(label, n, format!("reversed interval [{begin}, {end}]")));
        }
        let w = parse_number(fields[4], label, n, "weight")?;
        if w <= 0.0 {
            return Err(parse_err(label, n, format!("event weight must be positive, got {w}")));
        }
        for name in [fields[2], fields[3]] {
            if name.is_empty() {
                return Err(parse_err(label, n, "empty node identifier"));
            }
            if !nodes.iter().any(|x| x == name) {
                nodes.push(name.to_string());
            }
        }
        links.push((begin, end, fields[2].to_string(), fields[3].to_string()));
    }
    let (t_start, t_end) = match domain {
        Some(bounds) => bounds,
        None => {
            let lo = links.iter().map(|l| l.0).fold(f64::INFINITY, f64::min);
            let hi = links.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
            if links.is_empty() {
                return Err(parse_err(label, 1, "empty event file needs an explicit domain"));
            }
            (lo, hi)
        }
    };
    let borrowed: Vec<(f64, f64, &str, &str)> = links
        .iter()
        .map(|(b, e, u, v)| (*b, *e, u.as_str(), v.as_str()))
        .collect();
    EdgeEventSet::from_links(t_start, t_end, nodes, &borrowed)
}

/// One row of a serialized coefficient table.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientRow {
    pub frequency: usize,
    pub block: usize,
    pub atom: CoefficientAtom,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientAtom {
    Scaling,
    Detail(usize),
}

/// Renders the coefficient table as `f_index,block_i,atom,re,im` rows,
/// frequencies outermost, atoms in basis order; the scaling atom is
/// written as `s` and detail atoms as their tree index.
pub fn coefficients_to_string(coeffs: &FsCoefficients) -> String {
    let mut out = String::from(COEFF_HEADER);
    out.push('\n');
    for f in 0..coeffs.num_frequencies() {
        for (col, atom) in coeffs.atoms().iter().enumerate() {
            let value = coeffs.value(f, col);
            let (block, tag) = match *atom {
                Atom::Scaling { block } => (block, "s".to_string()),
                Atom::Detail { block, node } => (block, node.to_string()),
            };
            out.push_str(&format!(
                "{f},{block},{tag},{},{}\n",
                format_float(value.re),
                format_float(value.im)
            ));
        }
    }
    out
}

pub fn write_coefficients<P: AsRef<Path>>(coeffs: &FsCoefficients, path: P) -> Result<()> {
    fs::write(path, coefficients_to_string(coeffs))?;
    Ok(())
}

/// Reads a coefficient table back as raw rows.
pub fn read_coefficients<P: AsRef<Path>>(path: P) -> Result<Vec<CoefficientRow>> {
    let label = path.as_ref().display().to_string();
    let text = fs::read_to_string(&path)?;
    read_coefficients_str(&text, &label)
}

pub fn read_coefficients_str(text: &str, label: &str) -> Result<Vec<CoefficientRow>> {
    let mut lines = numbered_lines(text);
    match lines.next() {
        Some((_, h)) if h == COEFF_HEADER => {}
        Some((n, h)) => return Err(parse_err(label, n, format!("unrecognized header {h:?}"))),
        None => return Err(parse_err(label, 1, "empty file")),
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(label, n, format!("expected 5 fields, got {}", fields.len())));
        }
        let frequency: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(label, n, format!("invalid frequency index {:?}", fields[0])))?;
        let block: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(label, n, format!("invalid block index {:?}", fields[1])))?;
        let atom = if fields[2] == "s" {
            CoefficientAtom::Scaling
        } else {
            CoefficientAtom::Detail(fields[2].parse().map_err(|_| {
                parse_err(label, n, format!("invalid atom tag {:?}", fields[2]))
            })?)
        };
        let re = parse_number(fields[3], label, n, "real part")?;
        let im = parse_number(fields[4], label, n, "imaginary part")?;
        rows.push(CoefficientRow {
            frequency,
            block,
            atom,
            re,
            im,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{build_basis, fs_transform};

    fn config() -> DomainConfig {
        DomainConfig {
            t_start: 0.0,
            t_end: 10.0,
            samples: 10,
            relations: vec![
                ("a".into(), "b".into()),
                ("b".into(), "a".into()),
                ("b".into(), "c".into()),
                ("c".into(), "b".into()),
            ],
            dictionary: None,
            gains: None,
        }
    }

    #[test]
    fn parse_empty_body_gives_zero_stream() {
        let s = parse_stream_str("t,u,v,w\n", "test", &config()).unwrap();
        assert!(s.weights().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn instantaneous_rows_deposit_into_bins() {
        let s = parse_stream_str("t,u,v,w\n2.0,a,b,1.0\n", "test", &config()).unwrap();
        assert_eq!(s.weight(2, 0), 1.0);
        assert_eq!(s.weights().iter().filter(|&&w| w != 0.0).count(), 1);

        // two rows in the same bin are summed
        let s = parse_stream_str("t,u,v,w\n2.0,a,b,1.0\n2.5,a,b,0.25\n", "test", &config()).unwrap();
        assert_eq!(s.weight(2, 0), 1.25);
    }

    #[test]
    fn interval_rows_paint_fractional_coverage() {
        let s = parse_stream_str(
            "t_begin,t_end,u,v,w\n0.0,2.5,b,c,2.0\n",
            "test",
            &config(),
        )
        .unwrap();
        assert_eq!(s.weight(0, 2), 2.0);
        assert_eq!(s.weight(1, 2), 2.0);
        assert_eq!(s.weight(2, 2), 1.0);
        assert_eq!(s.weight(3, 2), 0.0);
    }

    #[test]
    fn parser_reports_line_numbers() {
        let cases = [
            ("t,u,v,w\n2.0,c,a,1.0\n", "unknown relation"),
            ("t,u,v,w\n2.0,a,b,NaN\n", "non-finite"),
            ("t,u,v,w\n99.0,a,b,1.0\n", "outside"),
            ("t_begin,t_end,u,v,w\n5.0,3.0,a,b,1.0\n", "reversed"),
            ("t,u,v,w\n1.0,a,b\n", "expected 4 fields"),
            ("who,knows\n", "unrecognized header"),
        ];
        for (text, needle) in cases {
            let err = parse_stream_str(text, "test", &config()).unwrap_err();
            let msg = err.to_string();
            assert!(msg.contains(needle), "{msg:?} should contain {needle:?}");
            if !text.starts_with("who") {
                assert!(msg.starts_with("test:2"), "{msg:?} should carry line 2");
            }
        }
    }

    #[test]
    fn stream_round_trip_is_exact_and_byte_stable() {
        let cfg = config();
        let mut s = parse_stream_str(
            "t,u,v,w\n2.0,a,b,1.0\n2.0,b,a,1.0\n7.5,b,c,-2.25\n",
            "test",
            &cfg,
        )
        .unwrap();
        // add a multi-bin run
        let mut w = s.weights().clone();
        for j in 3..7 {
            w[(j, 3)] = 0.5;
        }
        s = LinkStream::new(*s.grid(), s.space().clone(), w).unwrap();

        let text = stream_to_string(&s);
        let back = parse_stream_str(&text, "test", &cfg).unwrap();
        assert_eq!(back.weights(), s.weights());
        assert_eq!(stream_to_string(&back), text);
    }

    #[test]
    fn zero_stream_writes_header_only() {
        let cfg = config();
        let s = LinkStream::zeros(cfg.grid().unwrap(), cfg.space().unwrap());
        assert_eq!(stream_to_string(&s), "t_begin,t_end,u,v,w\n");
    }

    #[test]
    fn event_set_parsing() {
        let e = parse_event_set_str(
            "t_begin,t_end,u,v,w\n0.0,5.0,a,b,1.0\n0.0,10.0,b,c,1.0\n",
            "test",
            None,
        )
        .unwrap();
        assert_eq!(e.t_start(), 0.0);
        assert_eq!(e.t_end(), 10.0);
        assert_eq!(e.measure(), 15.0);

        let pinned = parse_event_set_str(
            "t_begin,t_end,u,v,w\n1.0,5.0,a,b,1.0\n",
            "test",
            Some((0.0, 10.0)),
        )
        .unwrap();
        assert_eq!(pinned.time_measure(), 10.0);

        assert!(parse_event_set_str(
            "t_begin,t_end,u,v,w\n1.0,5.0,a,b,0.0\n",
            "test",
            None
        )
        .is_err());
        assert!(parse_event_set_str("t,u,v,w\n", "test", None).is_err());
    }

    #[test]
    fn coefficient_round_trip() {
        let cfg = DomainConfig {
            dictionary: Some(vec![vec![0, 1, 2], vec![3]]),
            ..config()
        };
        let s = parse_stream_str(
            "t,u,v,w\n2.0,a,b,1.0\n4.5,b,c,2.0\n8.0,c,b,-1.0\n",
            "test",
            &cfg,
        )
        .unwrap();
        let basis = build_basis(
            s.space(),
            &cfg.structural_dictionary().unwrap().unwrap(),
        )
        .unwrap();
        let coeffs = fs_transform(&s, &basis).unwrap();
        let text = coefficients_to_string(&coeffs);
        let rows = read_coefficients_str(&text, "test").unwrap();
        assert_eq!(rows.len(), coeffs.num_frequencies() * coeffs.num_atoms());
        // spot-check the first scaling row against the table
        assert_eq!(rows[0].frequency, 0);
        assert_eq!(rows[0].block, 0);
        assert_eq!(rows[0].atom, CoefficientAtom::Scaling);
        assert_eq!(rows[0].re, coeffs.value(0, 0).re);
        assert_eq!(rows[0].im, coeffs.value(0, 0).im);
    }

    #[test]
    fn config_json_loads() {
        let json = r#"{
            "t_start": 0.0,
            "t_end": 8.0,
            "samples": 16,
            "relations": [["a","b"],["b","a"]],
            "dictionary": [[0],[1]],
            "gains": {"sigma": [1.0, 0.5], "nu": [[],[]]}
        }"#;
        let cfg: DomainConfig = serde_json::from_str(json).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.space().unwrap().num_relations(), 2);
        assert_eq!(cfg.grid().unwrap().dt(), 0.5);
        assert!(cfg.structural_dictionary().unwrap().is_some());
        assert_eq!(cfg.gains.as_ref().unwrap().sigma, vec![1.0, 0.5]);

        let bad: DomainConfig = serde_json::from_str(
            r#"{"t_start":0.0,"t_end":8.0,"samples":16,
                "relations":[["a","b"]],"dictionary":[[0],[0]]}"#,
        )
        .unwrap();
        assert!(bad.validate().is_err());
    }
}
