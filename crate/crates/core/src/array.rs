//! The wireless MapReduce array type, its file formats and the A1-A3 checks.
//!
//! An `N x K` array has one row per file and one column per node. A star in
//! `(i, k)` means node `k` maps file `i`; an integer `s` means node `k`
//! receives the intermediate value of its function on file `i` in shuffle
//! slot `s`.
//!
//! Grid accessors take 0-based `(row, col)` indices. Reports and file
//! formats use the conventional 1-based row, column and slot labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::report::{Condition, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Star,
    /// Shuffle slot, 1-based.
    Slot(usize),
}

impl Entry {
    pub fn is_star(self) -> bool {
        matches!(self, Entry::Star)
    }

    pub fn slot(self) -> Option<usize> {
        match self {
            Entry::Star => None,
            Entry::Slot(s) => Some(s),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Star => f.write_str("*"),
            Entry::Slot(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Entry {
    type Err = ();

    fn from_str(tok: &str) -> Result<Self, ()> {
        if tok == "*" {
            return Ok(Entry::Star);
        }
        if !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        match tok.parse::<usize>() {
            Ok(s) if s >= 1 => Ok(Entry::Slot(s)),
            _ => Err(()),
        }
    }
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Entry::Star => ser.serialize_str("*"),
            Entry::Slot(s) => ser.serialize_u64(*s as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct EntryVisitor;

        impl Visitor<'_> for EntryVisitor {
            type Value = Entry;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"*\" or a positive integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Entry, E> {
                v.parse()
                    .map_err(|_| E::custom(format!("malformed entry {v:?}")))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Entry, E> {
                if v == 0 {
                    return Err(E::custom("slot indices start at 1"));
                }
                Ok(Entry::Slot(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Entry, E> {
                if v < 1 {
                    return Err(E::custom("slot indices start at 1"));
                }
                Ok(Entry::Slot(v as usize))
            }
        }

        de.deserialize_any(EntryVisitor)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed entry {token:?} (expected `*` or a positive integer)")]
    MalformedEntry { line: usize, token: String },
    #[error("line {line}: row has {found} entries, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} has {found} stars but row 1 has {expected}")]
    InconsistentRowStars {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("header declares {field}={declared} but the grid gives {actual}")]
    HeaderMismatch {
        field: &'static str,
        declared: usize,
        actual: usize,
    },
    #[error("slot {slot} exceeds declared S={declared}")]
    SlotOutOfRange { slot: usize, declared: usize },
    #[error("empty array")]
    Empty,
    #[error("invalid JSON: {0}")]
    Json(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArrayError {
    #[error("slot {0} does not occur in the array")]
    SlotAbsent(usize),
}

/// File format for [`WmrArray::serialize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// A wireless MapReduce array together with its declared load `r` and slot
/// count `S`.
///
/// `r` and `S` are stored rather than recomputed so that a grid edited with
/// [`WmrArray::set`] keeps the parameters it was built for, and the checks
/// report what the edit broke.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WmrArray {
    rows: usize,
    cols: usize,
    load: usize,
    slots: usize,
    grid: Vec<Entry>,
}

impl WmrArray {
    /// Builds an array from rows, inferring `r` from the row star count and
    /// `S` from the largest slot index.
    pub fn from_rows(rows: Vec<Vec<Entry>>) -> Result<Self, ParseError> {
        let (n, k, grid) = flatten(rows)?;
        let load = uniform_row_stars(&grid, k)?;
        let slots = grid.iter().filter_map(|e| e.slot()).max().unwrap_or(0);
        Ok(Self {
            rows: n,
            cols: k,
            load,
            slots,
            grid,
        })
    }

    /// Builds an array with explicit `r` and `S`, checking only that the grid
    /// is rectangular and non-empty.
    pub fn with_params(rows: Vec<Vec<Entry>>, r: usize, s: usize) -> Result<Self, ParseError> {
        let (n, k, grid) = flatten(rows)?;
        Ok(Self {
            rows: n,
            cols: k,
            load: r,
            slots: s,
            grid,
        })
    }

    /// Number of nodes (columns).
    pub fn k(&self) -> usize {
        self.cols
    }

    /// Number of files (rows).
    pub fn n(&self) -> usize {
        self.rows
    }

    /// Computation load: stars per row.
    pub fn r(&self) -> usize {
        self.load
    }

    /// Number of shuffle slots.
    pub fn s(&self) -> usize {
        self.slots
    }

    /// Slot multiplicity `min{2r, K}`.
    pub fn g(&self) -> usize {
        (2 * self.load).min(self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.grid[row * self.cols + col]
    }

    /// Overwrites one entry. `r` and `S` are left as declared.
    pub fn set(&mut self, row: usize, col: usize, entry: Entry) {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.grid[row * self.cols + col] = entry;
    }

    /// Replaces the declared slot count.
    pub fn set_declared_slots(&mut self, s: usize) {
        self.slots = s;
    }

    pub fn row(&self, row: usize) -> &[Entry] {
        &self.grid[row * self.cols..(row + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Entry]> {
        self.grid.chunks(self.cols)
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Entry> + '_ {
        (0..self.rows).map(move |i| self.get(i, col))
    }

    pub fn to_rows(&self) -> Vec<Vec<Entry>> {
        self.rows().map(<[Entry]>::to_vec).collect()
    }

    /// Largest slot index present in the grid (0 if there is none).
    pub fn max_slot(&self) -> usize {
        self.grid.iter().filter_map(|e| e.slot()).max().unwrap_or(0)
    }

    /// All `(row, col)` positions holding slot `s`, in row-major order.
    pub fn positions_of(&self, s: usize) -> Vec<(usize, usize)> {
        self.grid
            .iter()
            .enumerate()
            .filter(|(_, e)| **e == Entry::Slot(s))
            .map(|(idx, _)| (idx / self.cols, idx % self.cols))
            .collect()
    }

    /// Files mapped by node `col` (0-based rows holding a star).
    pub fn mapped_files(&self, col: usize) -> Vec<usize> {
        (0..self.rows)
            .filter(|&i| self.get(i, col).is_star())
            .collect()
    }

    pub fn check_a1(&self) -> VerificationReport {
        check_a1(self)
    }

    pub fn check_a2(&self) -> VerificationReport {
        check_a2(self)
    }

    pub fn check_a3(&self) -> VerificationReport {
        check_a3(self)
    }

    pub fn verify(&self) -> VerificationReport {
        verify(self)
    }

    pub fn subarray(&self, s: usize) -> Result<SubArray, ArrayError> {
        subarray(self, s)
    }

    /// Text body: one line per row, single-space separated, no header.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(Entry::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Text format preceded by the `# wmra` header line.
    pub fn to_text_with_header(&self) -> String {
        format!(
            "# wmra K={} N={} r={} S={}\n{}",
            self.cols,
            self.rows,
            self.load,
            self.slots,
            self.to_text()
        )
    }

    pub fn to_json(&self) -> String {
        let doc = ArrayJson {
            k: Some(self.cols),
            n: Some(self.rows),
            r: Some(self.load),
            s: Some(self.slots),
            grid: self.to_rows(),
        };
        serde_json::to_string(&doc).expect("array serializes")
    }

    /// Serializes in the requested format. The text form carries a header
    /// only when the declared `S` differs from the largest slot present, so
    /// that parsing always recovers the same array.
    pub fn serialize(&self, format: Format) -> String {
        match format {
            Format::Text if self.slots != self.max_slot() => self.to_text_with_header(),
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }
}

impl fmt::Display for WmrArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for WmrArray {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_array(s)
    }
}

fn flatten(rows: Vec<Vec<Entry>>) -> Result<(usize, usize, Vec<Entry>), ParseError> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    if n == 0 || k == 0 {
        return Err(ParseError::Empty);
    }
    let mut grid = Vec::with_capacity(n * k);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != k {
            return Err(ParseError::RaggedRows {
                line: i + 1,
                expected: k,
                found: row.len(),
            });
        }
        grid.extend(row);
    }
    Ok((n, k, grid))
}

fn uniform_row_stars(grid: &[Entry], k: usize) -> Result<usize, ParseError> {
    let mut counts = grid
        .chunks(k)
        .map(|r| r.iter().filter(|e| e.is_star()).count());
    let first = counts.next().unwrap_or(0);
    for (i, c) in counts.enumerate() {
        if c != first {
            return Err(ParseError::InconsistentRowStars {
                row: i + 2,
                expected: first,
                found: c,
            });
        }
    }
    Ok(first)
}

/// Parsed `# <kind> key=value ...` header line.
#[derive(Debug, Clone, Default)]
pub(crate) struct Header {
    pub kind: String,
    pub fields: BTreeMap<String, usize>,
}

impl Header {
    fn parse(line: &str) -> Result<Self, ParseError> {
        let mut parts = line.trim_start_matches('#').split_whitespace();
        let kind = parts
            .next()
            .ok_or_else(|| ParseError::BadHeader("missing kind".into()))?
            .to_string();
        let mut fields = BTreeMap::new();
        for part in parts {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                ParseError::BadHeader(format!("expected key=value, got {part:?}"))
            })?;
            let value: usize = value.parse().map_err(|_| {
                ParseError::BadHeader(format!("{key} is not a non-negative integer"))
            })?;
            fields.insert(key.to_string(), value);
        }
        Ok(Self { kind, fields })
    }

    pub fn get(&self, key: &str) -> Option<usize> {
        self.fields.get(key).copied()
    }
}

/// Splits array text into an optional header and token rows.
pub(crate) fn parse_grid_text(text: &str) -> Result<(Option<Header>, Vec<Vec<Entry>>), ParseError> {
    let mut header = None;
    let mut rows: Vec<Vec<Entry>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if header.is_some() || !rows.is_empty() {
                return Err(ParseError::BadHeader(format!(
                    "line {line_no}: header must be the first non-blank line"
                )));
            }
            header = Some(Header::parse(line)?);
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Entry>()
                    .map_err(|_| ParseError::MalformedEntry {
                        line: line_no,
                        token: tok.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(ParseError::RaggedRows {
                    line: line_no,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok((header, rows))
}

fn cross_check(
    field: &'static str,
    declared: Option<usize>,
    actual: usize,
) -> Result<(), ParseError> {
    match declared {
        Some(d) if d != actual => Err(ParseError::HeaderMismatch {
            field,
            declared: d,
            actual,
        }),
        _ => Ok(()),
    }
}

fn apply_declared(
    rows: Vec<Vec<Entry>>,
    k: Option<usize>,
    n: Option<usize>,
    r: Option<usize>,
    s: Option<usize>,
) -> Result<WmrArray, ParseError> {
    let mut array = WmrArray::from_rows(rows)?;
    cross_check("K", k, array.k())?;
    cross_check("N", n, array.n())?;
    cross_check("r", r, array.r())?;
    if let Some(declared) = s {
        let max = array.max_slot();
        if max > declared {
            return Err(ParseError::SlotOutOfRange {
                slot: max,
                declared,
            });
        }
        array.slots = declared;
    }
    Ok(array)
}

#[derive(Serialize, Deserialize)]
struct ArrayJson {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    s: Option<usize>,
    grid: Vec<Vec<Entry>>,
}

/// Parses the text or JSON array format (JSON is detected by a leading `{`).
///
/// Only rectangularity and a common row star count are enforced here; the
/// defining conditions are left to [`verify`].
pub fn parse_array(text: &str) -> Result<WmrArray, ParseError> {
    if text.trim_start().starts_with('{') {
        let doc: ArrayJson =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        return apply_declared(doc.grid, doc.k, doc.n, doc.r, doc.s);
    }
    let (header, rows) = parse_grid_text(text)?;
    match header {
        None => WmrArray::from_rows(rows),
        Some(h) => {
            if h.kind != "wmra" {
                return Err(ParseError::BadHeader(format!(
                    "expected `# wmra`, found `# {}`",
                    h.kind
                )));
            }
            apply_declared(rows, h.get("K"), h.get("N"), h.get("r"), h.get("S"))
        }
    }
}

pub fn serialize_array(a: &WmrArray, format: Format) -> String {
    a.serialize(format)
}

pub fn check_a1(a: &WmrArray) -> VerificationReport {
    let mut report = VerificationReport::new();
    for (i, row) in a.rows().enumerate() {
        let stars = row.iter().filter(|e| e.is_star()).count();
        if stars != a.r() {
            report.push(
                Condition::A1,
                format!("row {}", i + 1),
                format!("{stars} stars, expected r={}", a.r()),
            );
        }
    }
    report
}

pub fn check_a2(a: &WmrArray) -> VerificationReport {
    let mut report = VerificationReport::new();
    let g = a.g();
    let mut counts = vec![0usize; a.s() + 1];
    for i in 0..a.n() {
        for k in 0..a.k() {
            if let Entry::Slot(s) = a.get(i, k) {
                if s > a.s() {
                    report.push(
                        Condition::A2,
                        format!("row {}, column {}", i + 1, k + 1),
                        format!("slot {s} outside [S] with S={}", a.s()),
                    );
                } else {
                    counts[s] += 1;
                }
            }
        }
    }
    for (s, &count) in counts.iter().enumerate().skip(1) {
        if count != g {
            report.push(
                Condition::A2,
                format!("slot {s}"),
                format!("occurs {count} times, expected g={g}"),
            );
        }
    }
    for k in 0..a.k() {
        let mut seen = BTreeMap::<usize, usize>::new();
        for e in a.column(k) {
            if let Entry::Slot(s) = e {
                *seen.entry(s).or_default() += 1;
            }
        }
        for (s, c) in seen.into_iter().filter(|&(_, c)| c > 1) {
            report.push(
                Condition::A2,
                format!("column {}", k + 1),
                format!("slot {s} occurs {c} times in one column"),
            );
        }
    }
    report
}

/// Rows and columns (0-based, ascending) of the subarray for one slot, with
/// the induced grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubArray {
    pub slot: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub grid: Vec<Vec<Entry>>,
}

impl SubArray {
    /// Integer entries in each subarray row.
    pub fn integers_per_row(&self) -> Vec<usize> {
        self.grid
            .iter()
            .map(|row| row.iter().filter(|e| !e.is_star()).count())
            .collect()
    }
}

pub fn subarray(a: &WmrArray, s: usize) -> Result<SubArray, ArrayError> {
    let positions = a.positions_of(s);
    if positions.is_empty() {
        return Err(ArrayError::SlotAbsent(s));
    }
    let rows: BTreeSet<usize> = positions.iter().map(|&(i, _)| i).collect();
    let cols: BTreeSet<usize> = positions.iter().map(|&(_, k)| k).collect();
    let rows: Vec<usize> = rows.into_iter().collect();
    let cols: Vec<usize> = cols.into_iter().collect();
    let grid = rows
        .iter()
        .map(|&i| cols.iter().map(|&k| a.get(i, k)).collect())
        .collect();
    Ok(SubArray {
        slot: s,
        rows,
        cols,
        grid,
    })
}

pub fn check_a3(a: &WmrArray) -> VerificationReport {
    check_subarray_rows(a, a.r(), Condition::A3)
}

pub(crate) fn check_subarray_rows(
    a: &WmrArray,
    limit: usize,
    condition: Condition,
) -> VerificationReport {
    let mut report = VerificationReport::new();
    for s in 1..=a.s() {
        // absent slots are an A2 matter
        let Ok(sub) = subarray(a, s) else { continue };
        for (pos, count) in sub.integers_per_row().into_iter().enumerate() {
            if count > limit {
                report.push(
                    condition,
                    format!("slot {s}, row {}", sub.rows[pos] + 1),
                    format!("{count} integers in subarray row, at most r={limit} allowed"),
                );
            }
        }
    }
    report
}

/// Checks A1, A2, A3 and the counting identity `S * g = N * (K - r)`.
pub fn verify(a: &WmrArray) -> VerificationReport {
    let mut report = check_a1(a);
    report.merge(check_a2(a));
    report.merge(check_a3(a));
    let lhs = a.s() * a.g();
    let rhs = a.n() * a.k().saturating_sub(a.r());
    if a.r() > a.k() || lhs != rhs {
        report.push(
            Condition::Counting,
            "array",
            format!(
                "S*g = {}*{} = {lhs} but N*(K-r) = {}*({}-{}) = {rhs}",
                a.s(),
                a.g(),
                a.n(),
                a.k(),
                a.r()
            ),
        );
    }
    report
}
