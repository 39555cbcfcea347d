//! SNR sweeps, absolute/relative error columns, and the comparison report
//! against the published per-SNR reference values for 256-point
//! constellations.

use crate::error::{Error, Result};
use crate::gaussian::QuadratureSpec;
use crate::lattice::{decision_regions, Constellation};
use crate::oracle::{exact_sep_awgn_with_regions, exact_sep_rayleigh};
use crate::sep::{
    sep_hqam_closed, sep_hqam_corrected, sep_hqam_rayleigh, sep_nn_awgn, SepParams, SnrPoint,
};
use crate::sim::{simulate, Channel, SimConfig};
use serde::Serialize;

/// One SNR point of a comparison sweep. Unrequested or failed columns are
/// absent; a failed estimator marks the row with its error text instead of
/// aborting the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub sep_eq5: Option<f64>,
    pub sep_eq6: Option<f64>,
    pub sep_nn: Option<f64>,
    pub sep_exact: Option<f64>,
    pub sep_mc: Option<f64>,
    pub mc_ci95: Option<f64>,
    pub ae_eq5: Option<f64>,
    pub rel_err_eq5: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Relative errors are suppressed below this exact-SEP floor.
pub const REL_ERR_FLOOR: f64 = 1e-12;

impl SweepRow {
    /// Fill the derived error columns from the closed-form and exact columns.
    fn finalize(&mut self) {
        if let (Some(approx), Some(exact)) = (self.sep_eq5, self.sep_exact) {
            let ae = (approx - exact).abs();
            self.ae_eq5 = Some(ae);
            self.rel_err_eq5 = if exact >= REL_ERR_FLOOR {
                Some(ae / exact)
            } else {
                None
            };
        }
    }
}

/// Column selection and per-column knobs for a sweep.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub with_closed: bool,
    pub with_corrected: bool,
    pub with_nn: bool,
    pub with_exact: bool,
    /// Monte Carlo column: symbol count, base seed, batch size. Every row
    /// derives its own stream from the base seed and the row index.
    pub mc: Option<(u64, u64, u64)>,
    pub quad: QuadratureSpec,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            with_closed: true,
            with_corrected: true,
            with_nn: true,
            with_exact: false,
            mc: None,
            quad: QuadratureSpec::default(),
        }
    }
}

fn row_seed(base: u64, row: usize) -> u64 {
    // splitmix-style spread so consecutive rows use unrelated streams
    (base ^ (row as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)).wrapping_mul(
        0xBF58_476D_1CE4_E5B9,
    )
}

/// Evaluate the requested estimators over an increasing dB grid.
///
/// The closed-form column holds the AWGN closed form for the AWGN channel
/// and the fading-averaged closed form for the Rayleigh channel; the
/// corrected and nearest-neighbour columns apply to AWGN only.
pub fn sweep(
    c: &Constellation,
    params: &SepParams,
    grid_db: &[f64],
    channel: Channel,
    opts: &SweepOptions,
) -> Result<Vec<SweepRow>> {
    if grid_db.is_empty() {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    if grid_db.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "sweep grid must be strictly increasing".into(),
        ));
    }
    let regions = if opts.with_exact && channel == Channel::Awgn {
        Some(decision_regions(c))
    } else {
        None
    };
    let mut rows = Vec::with_capacity(grid_db.len());
    for (i, &db) in grid_db.iter().enumerate() {
        let snr = SnrPoint::from_db(db);
        let mut row = SweepRow {
            snr_db: db,
            sep_eq5: None,
            sep_eq6: None,
            sep_nn: None,
            sep_exact: None,
            sep_mc: None,
            mc_ci95: None,
            ae_eq5: None,
            rel_err_eq5: None,
            error: None,
        };
        let mark = |row: &mut SweepRow, e: Error| {
            let text = e.to_string();
            match &mut row.error {
                Some(prev) => {
                    prev.push_str("; ");
                    prev.push_str(&text);
                }
                None => row.error = Some(text),
            }
        };
        if opts.with_closed {
            row.sep_eq5 = Some(match channel {
                Channel::Awgn => sep_hqam_closed(params, snr),
                Channel::RayleighFlat => match sep_hqam_rayleigh(params, snr) {
                    Ok(v) => v,
                    Err(e) => {
                        mark(&mut row, e);
                        rows.push(row);
                        continue;
                    }
                },
            });
        }
        if channel == Channel::Awgn {
            if opts.with_corrected {
                match sep_hqam_corrected(params, snr, &opts.quad) {
                    Ok(v) => row.sep_eq6 = Some(v),
                    Err(e) => mark(&mut row, e),
                }
            }
            if opts.with_nn {
                row.sep_nn = Some(sep_nn_awgn(params, snr));
            }
        }
        if opts.with_exact {
            let exact = match channel {
                Channel::Awgn => {
                    exact_sep_awgn_with_regions(c, regions.as_ref().unwrap(), snr)
                }
                Channel::RayleighFlat => exact_sep_rayleigh(c, snr),
            };
            match exact {
                Ok(e) => row.sep_exact = Some(e.value),
                Err(e) => mark(&mut row, e),
            }
        }
        if let Some((n_symbols, seed, batch_size)) = opts.mc {
            let cfg = SimConfig {
                n_symbols,
                seed: row_seed(seed, i),
                channel,
                batch_size,
            };
            match simulate(c, snr, &cfg) {
                Ok(est) => {
                    row.sep_mc = Some(est.sep_hat);
                    row.mc_ci95 = Some(est.ci95_halfwidth);
                }
                Err(e) => mark(&mut row, e),
            }
        }
        row.finalize();
        rows.push(row);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Published reference comparison
// ---------------------------------------------------------------------------

/// Published absolute-error columns for the 256-point constellation,
/// keyed by SNR in dB: this work's closed form and three prior
/// approximations, exactly as printed.
#[derive(Debug, Clone)]
pub struct ReferenceTable {
    pub snr_db: Vec<f64>,
    pub app5: Vec<f64>,
    pub ref8: Vec<f64>,
    pub ref9: Vec<f64>,
    pub ref10: Vec<f64>,
}

impl ReferenceTable {
    /// The published 256-point AE table.
    pub fn published_256() -> ReferenceTable {
        ReferenceTable {
            snr_db: vec![-4.0, -1.0, 2.0, 5.0, 8.0, 11.0, 14.0, 17.0, 20.0, 23.0],
            app5: vec![
                0.0039, 0.0045, 0.0048, 0.0051, 0.0062, 0.0049, 0.0053, 0.0059, 0.0088, 0.0086,
            ],
            ref8: vec![
                0.0041, 0.0056, 0.0072, 0.0095, 0.0132, 0.0152, 0.0192, 0.0221, 0.0236, 0.0169,
            ],
            ref9: vec![
                0.1306, 0.1305, 0.1287, 0.1237, 0.1127, 0.0872, 0.0460, 0.0085, 0.0458, 0.0357,
            ],
            ref10: vec![
                0.0046, 0.0050, 0.0052, 0.0058, 0.0077, 0.0081, 0.0110, 0.0135, 0.0150, 0.0093,
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table2Row {
    pub snr_db: f64,
    pub recomputed_ae: f64,
    pub published_app5: f64,
    pub published_ref8: f64,
    pub published_ref9: f64,
    pub published_ref10: f64,
    pub beats_ref9: bool,
    pub beats_ref8: bool,
    pub beats_ref10: bool,
}

/// Side-by-side of a recomputed AE column against the published columns,
/// with the dominance verdicts the published table claims.
#[derive(Debug, Clone, Serialize)]
pub struct Table2Report {
    pub rows: Vec<Table2Row>,
    /// Recomputed AE below the published ref-[9] column at every SNR.
    pub dominates_ref9_everywhere: bool,
    /// Recomputed AE below the published ref-[8] and ref-[10] columns at
    /// every SNR at or above -1 dB.
    pub dominates_ref8_ref10_from_minus1: bool,
}

pub fn table2_report(recomputed: &[SweepRow], reference: &ReferenceTable) -> Result<Table2Report> {
    if reference.snr_db.is_empty() {
        return Err(Error::GridMismatch("reference table is empty".into()));
    }
    if recomputed.len() != reference.snr_db.len() {
        return Err(Error::GridMismatch(format!(
            "{} recomputed rows vs {} reference rows",
            recomputed.len(),
            reference.snr_db.len()
        )));
    }
    let mut rows = Vec::with_capacity(recomputed.len());
    for (i, row) in recomputed.iter().enumerate() {
        if (row.snr_db - reference.snr_db[i]).abs() > 1e-9 {
            return Err(Error::GridMismatch(format!(
                "row {i}: snr {} vs reference {}",
                row.snr_db, reference.snr_db[i]
            )));
        }
        let ae = row.ae_eq5.ok_or_else(|| {
            Error::GridMismatch(format!("row {i} carries no recomputed AE column"))
        })?;
        rows.push(Table2Row {
            snr_db: row.snr_db,
            recomputed_ae: ae,
            published_app5: reference.app5[i],
            published_ref8: reference.ref8[i],
            published_ref9: reference.ref9[i],
            published_ref10: reference.ref10[i],
            beats_ref9: ae < reference.ref9[i],
            beats_ref8: ae < reference.ref8[i],
            beats_ref10: ae < reference.ref10[i],
        });
    }
    let dominates_ref9_everywhere = rows.iter().all(|r| r.beats_ref9);
    let dominates_ref8_ref10_from_minus1 = rows
        .iter()
        .filter(|r| r.snr_db >= -1.0)
        .all(|r| r.beats_ref8 && r.beats_ref10);
    Ok(Table2Report {
        rows,
        dominates_ref9_everywhere,
        dominates_ref8_ref10_from_minus1,
    })
}

impl Table2Report {
    /// Plain-text rendering for terminal output.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "snr_db  recomputed_ae  app5     ref8     ref9     ref10    beats_ref9\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>6} {:>14.6} {:>8.4} {:>8.4} {:>8.4} {:>8.4}  {}\n",
                r.snr_db,
                r.recomputed_ae,
                r.published_app5,
                r.published_ref8,
                r.published_ref9,
                r.published_ref10,
                if r.beats_ref9 { "yes" } else { "NO" },
            ));
        }
        out.push_str(&format!(
            "dominance: ref9 everywhere = {}, ref8/ref10 at snr >= -1 dB = {}\n",
            self.dominates_ref9_everywhere, self.dominates_ref8_ref10_from_minus1
        ));
        out
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(
            "snr_db,recomputed_ae,published_app5,published_ref8,published_ref9,published_ref10,beats_ref9\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.snr_db,
                r.recomputed_ae,
                r.published_app5,
                r.published_ref8,
                r.published_ref9,
                r.published_ref10,
                r.beats_ref9
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render sweep rows as CSV, prefixing `#`-comment header lines.
pub fn sweep_csv(rows: &[SweepRow], header_comments: &[String]) -> String {
    let mut out = String::new();
    for line in header_comments {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("snr_db,sep_eq5,sep_eq6,sep_nn,sep_exact,sep_mc,mc_ci95,ae_eq5,rel_err_eq5\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.snr_db,
            opt(r.sep_eq5),
            opt(r.sep_eq6),
            opt(r.sep_nn),
            opt(r.sep_exact),
            opt(r.sep_mc),
            opt(r.mc_ci95),
            opt(r.ae_eq5),
            opt(r.rel_err_eq5),
        ));
    }
    out
}

/// JSON mirror of the sweep (same keys as the CSV columns) under the
/// supplied metadata object.
pub fn sweep_json(rows: &[SweepRow], meta: serde_json::Value) -> String {
    let doc = serde_json::json!({
        "meta": meta,
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc).expect("sweep rows serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_constellation, ConstellationKind};
    use crate::sep::{resolve_params, BSource};

    fn setup() -> (Constellation, SepParams) {
        let c = build_constellation(4, ConstellationKind::RegularHqam).unwrap();
        let p = resolve_params(4, ConstellationKind::RegularHqam, BSource::Table1).unwrap();
        (c, p)
    }

    #[test]
    fn finalize_row_error_columns() {
        let mut row = SweepRow {
            snr_db: 0.0,
            sep_eq5: Some(0.25),
            sep_eq6: None,
            sep_nn: None,
            sep_exact: Some(0.25),
            sep_mc: None,
            mc_ci95: None,
            ae_eq5: None,
            rel_err_eq5: None,
            error: None,
        };
        row.finalize();
        assert_eq!(row.ae_eq5, Some(0.0));
        assert_eq!(row.rel_err_eq5, Some(0.0));

        let mut row2 = SweepRow {
            sep_eq5: Some(0.3),
            sep_exact: Some(0.2),
            ..row.clone()
        };
        row2.finalize();
        let ae = row2.ae_eq5.unwrap();
        let beta = row2.rel_err_eq5.unwrap();
        assert!((beta * 0.2 - ae).abs() < 1e-16);

        // high-SNR hygiene: no division by a vanishing exact value
        let mut row3 = SweepRow {
            sep_eq5: Some(1e-14),
            sep_exact: Some(1e-14),
            ..row
        };
        row3.finalize();
        assert!(row3.rel_err_eq5.is_none());
        assert_eq!(row3.ae_eq5, Some(0.0));
    }

    #[test]
    fn sweep_columns_and_order() {
        let (c, p) = setup();
        let grid = [-2.0, 3.0, 8.0];
        let opts = SweepOptions {
            with_exact: true,
            mc: Some((10_000, 7, 4096)),
            ..SweepOptions::default()
        };
        let rows = sweep(&c, &p, &grid, Channel::Awgn, &opts).unwrap();
        assert_eq!(rows.len(), 3);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.snr_db, grid[i]);
            assert!(r.sep_eq5.is_some());
            assert!(r.sep_eq6.is_some());
            assert!(r.sep_nn.is_some());
            assert!(r.sep_exact.is_some());
            assert!(r.sep_mc.is_some());
            assert!(r.ae_eq5.is_some());
            assert!(r.error.is_none());
        }
        // closed form within MC confidence + its own approximation slack
        for r in &rows {
            let gap = (r.sep_eq5.unwrap() - r.sep_mc.unwrap()).abs();
            assert!(gap < 3.0 * r.mc_ci95.unwrap() + 6e-3, "gap {gap}");
        }
    }

    #[test]
    fn sweep_grid_validation() {
        let (c, p) = setup();
        assert!(sweep(&c, &p, &[], Channel::Awgn, &SweepOptions::default()).is_err());
        assert!(sweep(
            &c,
            &p,
            &[1.0, 1.0],
            Channel::Awgn,
            &SweepOptions::default()
        )
        .is_err());
    }

    #[test]
    fn rayleigh_sweep_uses_fading_closed_form() {
        let (c, p) = setup();
        let opts = SweepOptions {
            with_exact: false,
            ..SweepOptions::default()
        };
        let rows = sweep(&c, &p, &[0.0, 10.0], Channel::RayleighFlat, &opts).unwrap();
        assert!(rows[0].sep_eq6.is_none());
        assert!(rows[0].sep_nn.is_none());
        let direct = crate::sep::sep_hqam_rayleigh(&p, SnrPoint::from_db(10.0)).unwrap();
        assert_eq!(rows[1].sep_eq5, Some(direct));
    }

    #[test]
    fn published_reference_self_consistency() {
        // the published columns already exhibit the claimed dominance
        let t = ReferenceTable::published_256();
        for i in 0..t.snr_db.len() {
            assert!(t.app5[i] < t.ref9[i], "snr {}", t.snr_db[i]);
            if t.snr_db[i] >= -1.0 {
                assert!(t.app5[i] < t.ref8[i]);
                assert!(t.app5[i] < t.ref10[i]);
            }
        }
        // spot values as printed
        assert_eq!(t.app5[7], 0.0059);
        assert_eq!(t.ref9[7], 0.0085);
        assert_eq!(t.app5[0], 0.0039);
        assert_eq!(t.ref8[0], 0.0041);
    }

    #[test]
    fn table2_report_grid_mismatch() {
        let empty = ReferenceTable {
            snr_db: vec![],
            app5: vec![],
            ref8: vec![],
            ref9: vec![],
            ref10: vec![],
        };
        assert!(matches!(
            table2_report(&[], &empty),
            Err(Error::GridMismatch(_))
        ));
        let reference = ReferenceTable::published_256();
        assert!(table2_report(&[], &reference).is_err());
    }

    #[test]
    fn table2_report_happy_path() {
        let reference = ReferenceTable::published_256();
        let rows: Vec<SweepRow> = reference
            .snr_db
            .iter()
            .map(|&db| SweepRow {
                snr_db: db,
                sep_eq5: Some(0.5),
                sep_eq6: None,
                sep_nn: None,
                sep_exact: Some(0.501),
                sep_mc: None,
                mc_ci95: None,
                ae_eq5: Some(0.001),
                rel_err_eq5: Some(0.002),
                error: None,
            })
            .collect();
        let rep = table2_report(&rows, &reference).unwrap();
        assert!(rep.dominates_ref9_everywhere);
        assert!(rep.dominates_ref8_ref10_from_minus1);
        assert_eq!(rep.rows.len(), 10);
        assert!(rep.to_text().contains("dominance"));
    }

    #[test]
    fn csv_and_json_round() {
        let (c, p) = setup();
        let opts = SweepOptions::default();
        let rows = sweep(&c, &p, &[0.0, 6.0], Channel::Awgn, &opts).unwrap();
        let csv1 = sweep_csv(&rows, &["invocation: test".into(), "seed: 42".into()]);
        let csv2 = sweep_csv(&rows, &["invocation: test".into(), "seed: 42".into()]);
        assert_eq!(csv1, csv2);
        assert!(csv1.starts_with("# invocation: test\n# seed: 42\n"));
        assert!(csv1
            .lines()
            .nth(2)
            .unwrap()
            .starts_with("snr_db,sep_eq5,sep_eq6,sep_nn,"));
        // unrequested columns are empty fields
        let data_line = csv1.lines().nth(3).unwrap();
        assert!(data_line.contains(",,"));
        let json = sweep_json(&rows, serde_json::json!({"seed": 42}));
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
        assert!(doc["rows"][0].get("sep_eq5").is_some());
        assert!(doc["rows"][0].get("error").is_none());
    }
}
