//! Extended placement delivery arrays and their conversion to wireless
//! MapReduce arrays.
//!
//! A `g`-regular `(K, r, N, Z, S)` EPDA is an `N x K` grid where every column
//! holds `Z` stars, every slot occurs `g` times (at most once per column) and
//! every row of every slot subarray holds at most `r` integers. When `g = 2r`,
//! `r = KZ/N` and each row holds `r` stars, the same grid is a
//! `(K, N, r, S)` wireless MapReduce array.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::array::{self, check_subarray_rows, Entry, ParseError, WmrArray};
use crate::ndt::Rational;
use crate::report::{Condition, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epda {
    grid: WmrArray,
    antennas: usize,
    column_stars: usize,
    regularity: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum EpdaError {
    #[error("EPDA fails verification:\n{0}")]
    InvalidEpda(VerificationReport),
    #[error("EPDA is {g}-regular; conversion needs g = 2r = {}", 2 * r)]
    NotRegular2r { g: usize, r: usize },
    #[error("K*Z/N = {k}*{z}/{n} does not equal r={r}")]
    LoadMismatch {
        k: usize,
        z: usize,
        n: usize,
        r: usize,
    },
    #[error("row {row} has {found} stars, conversion needs exactly r={r}")]
    RowStarMismatch { row: usize, found: usize, r: usize },
    #[error("EPDA family parameters need 1 <= r <= K/2, got K={k}, r={r}")]
    InvalidLoad { k: usize, r: usize },
}

impl Epda {
    /// Wraps a grid with declared EPDA parameters. `K` and `N` come from the
    /// grid shape.
    pub fn new(
        rows: Vec<Vec<Entry>>,
        r: usize,
        z: usize,
        s: usize,
        g: usize,
    ) -> Result<Self, ParseError> {
        Ok(Self {
            grid: WmrArray::with_params(rows, r, s)?,
            antennas: r,
            column_stars: z,
            regularity: g,
        })
    }

    /// Reinterprets an array's grid as an EPDA with the given `Z` and `g`.
    pub fn from_wmra(a: &WmrArray, z: usize, g: usize) -> Self {
        Self {
            grid: a.clone(),
            antennas: a.r(),
            column_stars: z,
            regularity: g,
        }
    }

    pub fn k(&self) -> usize {
        self.grid.k()
    }

    pub fn r(&self) -> usize {
        self.antennas
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn z(&self) -> usize {
        self.column_stars
    }

    pub fn s(&self) -> usize {
        self.grid.s()
    }

    pub fn g(&self) -> usize {
        self.regularity
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        self.grid.get(row, col)
    }

    pub fn set(&mut self, row: usize, col: usize, entry: Entry) {
        self.grid.set(row, col, entry);
    }

    pub fn to_rows(&self) -> Vec<Vec<Entry>> {
        self.grid.to_rows()
    }

    pub fn verify(&self) -> VerificationReport {
        verify_epda(self)
    }

    pub fn to_text(&self) -> String {
        format!(
            "# epda K={} r={} N={} Z={} S={} g={}\n{}",
            self.k(),
            self.r(),
            self.n(),
            self.z(),
            self.s(),
            self.g(),
            self.grid.to_text()
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&EpdaJson {
            k: Some(self.k()),
            r: self.r(),
            n: Some(self.n()),
            z: self.z(),
            s: self.s(),
            g: self.g(),
            grid: self.to_rows(),
        })
        .expect("EPDA serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct EpdaJson {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    r: usize,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(rename = "Z")]
    z: usize,
    #[serde(rename = "S")]
    s: usize,
    g: usize,
    grid: Vec<Vec<Entry>>,
}

fn require(h: &array::Header, key: &str) -> Result<usize, ParseError> {
    h.get(key)
        .ok_or_else(|| ParseError::BadHeader(format!("EPDA header is missing {key}=")))
}

fn check_shape(epda: &Epda, k: Option<usize>, n: Option<usize>) -> Result<(), ParseError> {
    for (field, declared, actual) in [("K", k, epda.k()), ("N", n, epda.n())] {
        if let Some(d) = declared {
            if d != actual {
                return Err(ParseError::HeaderMismatch {
                    field,
                    declared: d,
                    actual,
                });
            }
        }
    }
    let max = epda.grid.max_slot();
    if max > epda.s() {
        return Err(ParseError::SlotOutOfRange {
            slot: max,
            declared: epda.s(),
        });
    }
    Ok(())
}

/// Parses an EPDA from text (with a mandatory `# epda K= r= N= Z= S= g=`
/// header) or JSON.
pub fn parse_epda(text: &str) -> Result<Epda, ParseError> {
    if text.trim_start().starts_with('{') {
        let doc: EpdaJson =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        let epda = Epda::new(doc.grid, doc.r, doc.z, doc.s, doc.g)?;
        check_shape(&epda, doc.k, doc.n)?;
        return Ok(epda);
    }
    let (header, rows) = array::parse_grid_text(text)?;
    let h =
        header.ok_or_else(|| ParseError::BadHeader("EPDA files need a `# epda` header".into()))?;
    if h.kind != "epda" {
        return Err(ParseError::BadHeader(format!(
            "expected `# epda`, found `# {}`",
            h.kind
        )));
    }
    let epda = Epda::new(
        rows,
        require(&h, "r")?,
        require(&h, "Z")?,
        require(&h, "S")?,
        require(&h, "g")?,
    )?;
    check_shape(&epda, h.get("K"), h.get("N"))?;
    Ok(epda)
}

/// Checks the three EPDA conditions for the declared parameters.
pub fn verify_epda(e: &Epda) -> VerificationReport {
    let mut report = VerificationReport::new();
    let (k, n) = (e.k(), e.n());

    if e.r() == 0 || e.r() >= k {
        report.push(
            Condition::EpdaParams,
            "parameters",
            format!("need 0 < r < K, got r={} K={k}", e.r()),
        );
    }
    if e.z() == 0 || e.z() >= n {
        report.push(
            Condition::EpdaParams,
            "parameters",
            format!("need 0 < Z < N, got Z={} N={n}", e.z()),
        );
    }

    for col in 0..k {
        let stars = e.grid.column(col).filter(|x| x.is_star()).count();
        if stars != e.z() {
            report.push(
                Condition::EpdaColumnStars,
                format!("column {}", col + 1),
                format!("{stars} stars, expected Z={}", e.z()),
            );
        }
    }

    let mut counts = vec![0usize; e.s() + 1];
    for i in 0..n {
        for col in 0..k {
            if let Entry::Slot(s) = e.get(i, col) {
                if s > e.s() {
                    report.push(
                        Condition::EpdaRegularity,
                        format!("row {}, column {}", i + 1, col + 1),
                        format!("slot {s} outside [S] with S={}", e.s()),
                    );
                } else {
                    counts[s] += 1;
                }
            }
        }
    }
    for (s, &count) in counts.iter().enumerate().skip(1) {
        if count != e.g() {
            report.push(
                Condition::EpdaRegularity,
                format!("slot {s}"),
                format!("occurs {count} times, expected g={}", e.g()),
            );
        }
    }
    for col in 0..k {
        let mut slots: Vec<usize> = e.grid.column(col).filter_map(Entry::slot).collect();
        slots.sort_unstable();
        for pair in slots.windows(2).filter(|w| w[0] == w[1]) {
            report.push(
                Condition::EpdaRegularity,
                format!("column {}", col + 1),
                format!("slot {} repeated in one column", pair[0]),
            );
        }
    }

    report.merge(check_subarray_rows(&e.grid, e.r(), Condition::EpdaSubarray));
    report
}

/// Converts a `2r`-regular EPDA with `r = KZ/N` and `r` stars per row into
/// a wireless MapReduce array over the same grid.
///
/// The structural hypotheses are checked before the full EPDA verification
/// so that the specific failing hypothesis is reported.
pub fn wmra_from_epda(e: &Epda) -> Result<WmrArray, EpdaError> {
    let r = e.r();
    if e.g() != 2 * r {
        return Err(EpdaError::NotRegular2r { g: e.g(), r });
    }
    if e.k() * e.z() != r * e.n() {
        return Err(EpdaError::LoadMismatch {
            k: e.k(),
            z: e.z(),
            n: e.n(),
            r,
        });
    }
    for i in 0..e.n() {
        let stars = (0..e.k()).filter(|&c| e.get(i, c).is_star()).count();
        if stars != r {
            return Err(EpdaError::RowStarMismatch {
                row: i + 1,
                found: stars,
                r,
            });
        }
    }
    let report = verify_epda(e);
    if !report.passed {
        return Err(EpdaError::InvalidEpda(report));
    }
    let out = WmrArray::with_params(e.to_rows(), r, e.s()).expect("grid already rectangular");
    debug_assert!(out.verify().passed);
    Ok(out)
}

/// File and slot counts of the EPDA-derived arrays for `r <= K/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Corollary1Params {
    pub n: u64,
    pub s: u64,
    pub ndt: Rational,
}

/// `N = 2Kr / gcd(K, r)^2`, `S = N (K - r) / 2r` and
/// `L = (1 - r/K) / 2r`.
pub fn corollary1_params(k: usize, r: usize) -> Result<Corollary1Params, EpdaError> {
    if r < 1 || 2 * r > k {
        return Err(EpdaError::InvalidLoad { k, r });
    }
    let (k, r) = (k as u64, r as u64);
    let d = k.gcd(&r);
    let numer = 2 * k * r;
    assert_eq!(numer % (d * d), 0, "gcd^2 divides 2Kr");
    let n = numer / (d * d);
    assert_eq!((n * (k - r)) % (2 * r), 0, "2r divides N(K-r)");
    let s = n * (k - r) / (2 * r);
    Ok(Corollary1Params {
        n,
        s,
        ndt: Rational::new(k - r, 2 * r * k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::parse_array;
    use crate::construct::{construct_case_a, construct_case_b};

    fn c_as_epda() -> Epda {
        Epda::from_wmra(&construct_case_b(6, 2).unwrap(), 1, 4)
    }

    #[test]
    fn c_is_a_four_regular_epda() {
        let e = c_as_epda();
        assert_eq!(
            (e.k(), e.r(), e.n(), e.z(), e.s(), e.g()),
            (6, 2, 3, 1, 3, 4)
        );
        let report = verify_epda(&e);
        assert!(report.passed, "{report}");
    }

    #[test]
    fn deleting_a_star_breaks_column_count() {
        let mut e = c_as_epda();
        e.set(0, 0, Entry::Slot(2));
        let report = verify_epda(&e);
        assert!(report.fails(Condition::EpdaColumnStars));
    }

    #[test]
    fn converts_c_back() {
        let c = construct_case_b(6, 2).unwrap();
        let out = wmra_from_epda(&c_as_epda()).unwrap();
        assert_eq!(out, c);
        assert!(out.verify().passed);
    }

    #[test]
    fn verified_arrays_reinterpret_as_epdas() {
        let arrays = [
            construct_case_a(5, 3).unwrap(),
            construct_case_b(6, 2).unwrap(),
            parse_array("* 1 1 * *\n* * 2 1 *\n* * * 2 1\n1 * * * 2\n2 2 * * *").unwrap(),
        ];
        for a in arrays {
            let z = a.n() * a.r() / a.k();
            assert_eq!(z * a.k(), a.n() * a.r());
            let e = Epda::from_wmra(&a, z, a.g());
            assert!(verify_epda(&e).passed);
        }
    }

    #[test]
    fn rejects_non_2r_regular() {
        let a = construct_case_a(5, 3).unwrap();
        let e = Epda::from_wmra(&a, 3, 5);
        assert!(verify_epda(&e).passed);
        assert_eq!(
            wmra_from_epda(&e),
            Err(EpdaError::NotRegular2r { g: 5, r: 3 })
        );
    }

    #[test]
    fn rejects_load_mismatch() {
        let e = Epda::new(construct_case_b(6, 2).unwrap().to_rows(), 2, 2, 3, 4).unwrap();
        assert!(matches!(
            wmra_from_epda(&e),
            Err(EpdaError::LoadMismatch { .. })
        ));
    }

    #[test]
    fn rejects_uneven_row_stars() {
        // columns keep one star each and KZ/N = 2 = r, but row 1 has 3 stars
        let (_, rows) = array::parse_grid_text("* 2 * * 2 1\n2 * 3 2 * 3\n1 3 3 1 3 *").unwrap();
        let e = Epda::new(rows, 2, 1, 3, 4).unwrap();
        assert_eq!(
            wmra_from_epda(&e),
            Err(EpdaError::RowStarMismatch {
                row: 1,
                found: 3,
                r: 2
            })
        );
    }

    #[test]
    fn balanced_rows_follow_from_the_other_conditions() {
        // with g = 2r every integer-bearing row needs >= r stars inside each
        // subarray, so KZ = Nr leaves no room for an uneven row
        for (k, r) in [(4, 2), (6, 2), (6, 3), (8, 2), (8, 4), (9, 3)] {
            let a = construct_case_b(k, r).unwrap();
            let e = Epda::from_wmra(&a, a.n() * r / k, 2 * r);
            assert!(verify_epda(&e).passed);
            assert!(wmra_from_epda(&e).is_ok());
        }
    }

    #[test]
    fn corollary_examples() {
        let p = corollary1_params(6, 2).unwrap();
        assert_eq!((p.n, p.s, p.ndt), (6, 6, Rational::new(1, 6)));
        let p = corollary1_params(4, 2).unwrap();
        assert_eq!((p.n, p.s, p.ndt), (4, 2, Rational::new(1, 8)));
        let p = corollary1_params(2, 1).unwrap();
        assert_eq!((p.n, p.s, p.ndt), (4, 2, Rational::new(1, 4)));
        assert!(corollary1_params(5, 3).is_err());
        assert!(corollary1_params(5, 0).is_err());
    }

    #[test]
    fn parses_text_and_json() {
        let e = c_as_epda();
        let text = e.to_text();
        assert!(text.starts_with("# epda K=6 r=2 N=3 Z=1 S=3 g=4\n"));
        assert_eq!(parse_epda(&text).unwrap(), e);
        assert_eq!(parse_epda(&e.to_json()).unwrap(), e);
        assert!(matches!(
            parse_epda("* 1\n1 *"),
            Err(ParseError::BadHeader(_))
        ));
        assert!(matches!(
            parse_epda("# epda K=2 r=1 N=2 Z=1 S=1\n* 1\n1 *"),
            Err(ParseError::BadHeader(_))
        ));
        assert!(matches!(
            parse_epda("# epda K=3 r=1 N=2 Z=1 S=1 g=2\n* 1\n1 *"),
            Err(ParseError::HeaderMismatch { field: "K", .. })
        ));
    }
}
