//! Parameter sweeps and CSV output.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rayon::prelude::*;

use crate::config::{GridArg, RunConfig};
use crate::dynamics::{propagate, CondensateDrive};
use crate::optics::make_beam_splitter;
use crate::projection::{conditional_state, JointState, ProbeField};
use crate::witness::{evaluate, WitnessReport};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Minimum partial-transpose eigenvalue against τ for n_p ∈ {10, 20}.
    Fig2,
    /// Inequality margin against τ for n_p ∈ {10, 20} with in-phase probes.
    Fig3,
    /// Inequality margin against τ for θ_αβ ∈ {0, π/2}.
    Fig4,
    /// Inequality margin against η at fixed τ for θ_αβ ∈ {0, π/2}.
    Fig5,
    /// Cross product of the configured and `--grid` axes.
    Generic,
}

pub const FIG5_TAU: f64 = 5.0;

/// One parameter point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub tau: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub n_p: f64,
    pub theta_alpha: f64,
    pub theta_beta: f64,
}

impl SweepPoint {
    pub fn from_config(cfg: &RunConfig, tau: f64) -> Self {
        Self {
            tau,
            eta_a: cfg.eta_a,
            eta_b: cfg.eta_b,
            delta_a: cfg.delta_a,
            delta_b: cfg.delta_b,
            n_p: cfg.n_p,
            theta_alpha: cfg.theta_alpha,
            theta_beta: cfg.theta_beta,
        }
    }

    pub fn theta_ab(&self) -> f64 {
        self.theta_alpha - self.theta_beta
    }

    fn set_theta_ab(&mut self, theta_ab: f64) {
        self.theta_alpha = self.theta_beta + theta_ab;
    }

    fn set(&mut self, key: &str, value: f64) {
        match key {
            "tau" => self.tau = value,
            "eta" => {
                self.eta_a = value;
                self.eta_b = value;
            }
            "eta_a" => self.eta_a = value,
            "eta_b" => self.eta_b = value,
            "delta_a" => self.delta_a = value,
            "delta_b" => self.delta_b = value,
            "n_p" => self.n_p = value,
            "theta_alpha" => self.theta_alpha = value,
            "theta_beta" => self.theta_beta = value,
            "theta_ab" => self.set_theta_ab(value),
            _ => unreachable!("grid keys are validated at parse time"),
        }
    }
}

/// Heralded state for one point.
pub fn state_at(cfg: &RunConfig, p: &SweepPoint) -> Result<JointState> {
    let coeffs_a = propagate(&CondensateDrive::real(p.eta_a, p.delta_a)?, p.tau)?;
    let coeffs_b = propagate(&CondensateDrive::real(p.eta_b, p.delta_b)?, p.tau)?;
    let probe_a = ProbeField::from_photon_number(p.n_p, p.theta_alpha)?;
    let probe_b = ProbeField::from_photon_number(p.n_p, p.theta_beta)?;
    let bs = make_beam_splitter(cfg.bs_t_mag, cfg.phi, cfg.phi_prime)?;
    conditional_state(&coeffs_a, &coeffs_b, &probe_a, &probe_b, &bs, cfg.n_max)
}

pub fn evaluate_point(cfg: &RunConfig, p: &SweepPoint) -> Result<(JointState, WitnessReport)> {
    let state = state_at(cfg, p)?;
    let report = evaluate(&state)?;
    Ok((state, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub coincidence_weight: f64,
    /// `Err(kind)` when the point could not be evaluated.
    pub report: std::result::Result<WitnessReport, &'static str>,
}

impl SweepRow {
    pub fn status(&self) -> &'static str {
        match &self.report {
            Ok(_) => "ok",
            Err(kind) => kind,
        }
    }
}

fn grid_or<'a>(grids: &'a [GridArg], key: &str, default_key: &str) -> Option<&'a [f64]> {
    grids
        .iter()
        .rev()
        .find(|g| g.key.as_deref() == Some(key) || (g.key.is_none() && key == default_key))
        .map(|g| g.values.as_slice())
}

/// Parameter points for a figure, in output order.
pub fn figure_points(figure: Figure, cfg: &RunConfig, grids: &[GridArg]) -> Result<Vec<SweepPoint>> {
    let default_axis = if figure == Figure::Fig5 { "eta" } else { "tau" };
    let taus = grid_or(grids, "tau", default_axis)
        .map(<[f64]>::to_vec)
        .unwrap_or_else(|| cfg.tau_grid());
    let along_tau = |series: &[SweepPoint]| -> Vec<SweepPoint> {
        series
            .iter()
            .flat_map(|s| taus.iter().map(move |&tau| SweepPoint { tau, ..*s }))
            .collect()
    };
    let base = SweepPoint::from_config(cfg, 0.0);
    let with_theta_ab = |mut p: SweepPoint, theta_ab: f64| {
        p.set_theta_ab(theta_ab);
        p
    };

    let points = match figure {
        Figure::Fig2 => along_tau(&[10.0, 20.0].map(|n_p| SweepPoint { n_p, ..base })),
        Figure::Fig3 => along_tau(&[10.0, 20.0].map(|n_p| with_theta_ab(SweepPoint { n_p, ..base }, 0.0))),
        Figure::Fig4 => along_tau(&[0.0, FRAC_PI_2].map(|t| with_theta_ab(SweepPoint { n_p: 10.0, ..base }, t))),
        Figure::Fig5 => {
            let etas = grid_or(grids, "eta", default_axis)
                .map(<[f64]>::to_vec)
                .unwrap_or_else(|| (0..=44).map(|i| 1.0 + 0.25 * i as f64).collect());
            let tau = grid_or(grids, "tau", "").map_or(FIG5_TAU, |t| t[0]);
            [0.0, FRAC_PI_2]
                .iter()
                .flat_map(|&t| {
                    let series = with_theta_ab(SweepPoint { n_p: 10.0, tau, ..base }, t);
                    etas.iter().map(move |&eta| SweepPoint {
                        eta_a: eta,
                        eta_b: eta,
                        ..series
                    })
                })
                .collect()
        }
        Figure::Generic => {
            let mut points = along_tau(&[base]);
            for g in grids.iter().filter(|g| g.key.as_deref().is_some_and(|k| k != "tau")) {
                let key = g.key.as_deref().unwrap_or_default();
                points = points
                    .iter()
                    .flat_map(|p| {
                        g.values.iter().map(move |&v| {
                            let mut q = *p;
                            q.set(key, v);
                            q
                        })
                    })
                    .collect();
            }
            points
        }
    };
    if points.len() > crate::config::MAX_GRID_POINTS {
        return Err(Error::ConfigValidation {
            field: "grid".into(),
            reason: format!("sweep expands to {} points", points.len()),
        });
    }
    Ok(points)
}

/// Evaluates every point in parallel; output order matches input order.
pub fn run(cfg: &RunConfig, points: &[SweepPoint]) -> Vec<SweepRow> {
    points
        .par_iter()
        .map(|p| match evaluate_point(cfg, p) {
            Ok((state, report)) => SweepRow {
                point: *p,
                coincidence_weight: state.coincidence_weight(),
                report: Ok(report),
            },
            Err(e) => SweepRow {
                point: *p,
                coincidence_weight: f64::NAN,
                report: Err(e.kind()),
            },
        })
        .collect()
}

pub const CSV_HEADER: &str = "tau,eta_a,eta_b,n_p,theta_ab,min_pt_eig,lhs,rhs,lhs_minus_rhs,violated,\
xi_xp,coincidence_weight,n2,n_tot,m_term,cross_abs,status";

fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let p = &row.point;
        let mut fields = vec![num(p.tau), num(p.eta_a), num(p.eta_b), num(p.n_p), num(p.theta_ab())];
        match &row.report {
            Ok(r) => fields.extend([
                num(r.min_pt_eig),
                num(r.lhs),
                num(r.rhs),
                num(r.lhs_minus_rhs()),
                u8::from(r.violated).to_string(),
                num(r.xi_xp),
                num(row.coincidence_weight),
                num(r.n2),
                num(r.n_tot),
                num(r.m_term),
                num(r.cross.norm()),
            ]),
            Err(_) => {
                fields.extend(std::iter::repeat_n(num(f64::NAN), 4));
                fields.push(String::new());
                fields.extend(std::iter::repeat_n(num(f64::NAN), 6));
            }
        }
        fields.push(row.status().to_string());
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_grid_arg;

    fn small_cfg() -> RunConfig {
        RunConfig {
            tau_stop: 1.0,
            tau_step: 0.5,
            ..RunConfig::default()
        }
    }

    #[test]
    fn figure_series_layout() {
        let cfg = small_cfg();
        let f2 = figure_points(Figure::Fig2, &cfg, &[]).unwrap();
        assert_eq!(f2.len(), 6);
        assert_eq!(f2[0].n_p, 10.0);
        assert_eq!(f2[3].n_p, 20.0);
        let f4 = figure_points(Figure::Fig4, &cfg, &[]).unwrap();
        assert_eq!(f4[0].theta_ab(), 0.0);
        assert_eq!(f4[5].theta_ab(), FRAC_PI_2);
        let f5 = figure_points(Figure::Fig5, &cfg, &[]).unwrap();
        assert_eq!(f5.len(), 90);
        assert!(f5.iter().all(|p| p.tau == FIG5_TAU && p.eta_a == p.eta_b));
        assert_eq!(f5[44].eta_a, 12.0);
    }

    #[test]
    fn unkeyed_grid_targets_the_figure_axis() {
        let cfg = small_cfg();
        let g = [parse_grid_arg("0,2").unwrap()];
        assert_eq!(figure_points(Figure::Fig3, &cfg, &g).unwrap().len(), 4);
        let f5 = figure_points(Figure::Fig5, &cfg, &g).unwrap();
        assert_eq!(f5.iter().map(|p| p.eta_a).collect::<Vec<_>>(), vec![0.0, 2.0, 0.0, 2.0]);
    }

    #[test]
    fn generic_cross_product() {
        let cfg = small_cfg();
        let g = [parse_grid_arg("eta_a=1,2").unwrap(), parse_grid_arg("theta_ab=0,1,2").unwrap()];
        let pts = figure_points(Figure::Generic, &cfg, &g).unwrap();
        assert_eq!(pts.len(), 3 * 2 * 3);
        assert_eq!(pts[5].theta_ab(), 2.0);
        assert_eq!(pts[5].eta_a, 2.0);
        assert_eq!(pts[5].eta_b, cfg.eta_b);
    }

    #[test]
    fn error_rows_are_flagged() {
        let cfg = RunConfig::default();
        let points = [
            SweepPoint::from_config(&cfg, 1.0),
            SweepPoint { eta_a: 100.0, ..SweepPoint::from_config(&cfg, 30.0) },
        ];
        let rows = run(&cfg, &points);
        assert_eq!(rows[0].status(), "ok");
        assert_eq!(rows[1].status(), "overflow");
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        let ncol = CSV_HEADER.split(',').count();
        assert!(lines[1..].iter().all(|l| l.split(',').count() == ncol));
        assert!(lines[2].ends_with(",overflow"));
        assert!(lines[2].contains("NaN"));
    }

    #[test]
    fn tau_zero_heralds_vacuum() {
        let cfg = RunConfig::default();
        let (state, report) = evaluate_point(&cfg, &SweepPoint::from_config(&cfg, 0.0)).unwrap();
        assert!((state.amplitude(0, 0).norm() - 1.0).abs() < 1e-12);
        assert!(!report.violated);
        assert!(report.min_pt_eig > -1e-12);
    }
}
