//! CSV output with a `#`-prefixed manifest header.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::montecarlo::{ExperimentConfig, SweepRow, SweepSpec, TransitionRow};
use crate::smallworld::LinkKind;
use crate::VERSION;

pub const SWEEP_HEADER: &str =
    "axis1,axis2,p_global,p_global_se,mean_time,mean_time_se,mean_energy,mean_energy_se,n_success,n_runs";

/// Self-describing header written at the top of every output file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub master_seed: u64,
    pub config: Vec<(String, String)>,
    pub rows: usize,
    pub wall_clock_seconds: f64,
    /// Extra `key: value` lines (fits, per-cell errors, ...).
    pub notes: Vec<(String, String)>,
}

/// Prefix of the only manifest line that varies between identical runs.
pub const WALL_CLOCK_PREFIX: &str = "# wall_clock_seconds:";

impl RunManifest {
    pub fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        RunManifest {
            command: command.to_string(),
            master_seed: cfg.master_seed,
            config: config_echo(cfg),
            ..Default::default()
        }
    }

    /// Replaces the echo of swept parameters by their axis values.
    pub fn with_axes(mut self, spec: &SweepSpec) -> Self {
        let swept: Vec<&str> = std::iter::once(&spec.axis1).chain(&spec.axis2).map(|a| a.param.name()).collect();
        self.config.retain(|(k, _)| !swept.contains(&k.as_str()));
        let fmt_axis = |a: &crate::montecarlo::Axis| {
            let vals: Vec<String> = a.values.iter().map(|v| v.to_string()).collect();
            format!("{} = [{}]", a.param, vals.join(" "))
        };
        self.config.push(("axis1".into(), fmt_axis(&spec.axis1)));
        if let Some(a2) = &spec.axis2 {
            self.config.push(("axis2".into(), fmt_axis(a2)));
        }
        self
    }

    pub fn write<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# geocascade {VERSION}")?;
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# master_seed: {}", self.master_seed)?;
        for (k, v) in &self.config {
            writeln!(w, "# config.{k}: {v}")?;
        }
        for (k, v) in &self.notes {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "# rows: {}", self.rows)?;
        writeln!(w, "{WALL_CLOCK_PREFIX} {:.3}", self.wall_clock_seconds)
    }
}

fn config_echo(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let c = &cfg.cascade;
    let mut out = vec![
        ("n_nodes", cfg.n_nodes.to_string()),
        ("L", cfg.side.to_string()),
        ("boundary", cfg.boundary.to_string()),
        ("R", cfg.range.to_string()),
        ("phi", c.phi.to_string()),
        ("schedule", c.schedule.to_string()),
        ("seed", c.seed.to_string()),
        ("cutoff_fraction", c.cutoff_fraction.to_string()),
        (
            "max_steps",
            c.max_steps.map_or_else(|| format!("{}", c.step_budget(cfg.n_nodes)), |m| m.to_string()),
        ),
        ("c", cfg.energy_c.to_string()),
        ("n_runs", cfg.n_runs.to_string()),
        ("p_r", cfg.scheme.p_r.to_string()),
    ];
    match cfg.scheme.kind {
        LinkKind::Uniform => out.push(("scheme", "uniform".into())),
        LinkKind::PowerLaw { delta } => {
            out.push(("scheme", "power_law".into()));
            out.push(("delta", delta.to_string()));
        }
        LinkKind::Cutoff { d_c } => {
            out.push(("scheme", "cutoff".into()));
            out.push(("d_c", d_c.to_string()));
        }
    }
    out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes sweep rows in grid order. Failed cells keep their axis values,
/// leave the statistics empty and are described in the manifest.
pub fn emit_sweep_csv<W: Write + ?Sized>(rows: &[SweepRow], manifest: &RunManifest, w: &mut W) -> io::Result<()> {
    let mut manifest = manifest.clone();
    manifest.rows = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if let Err(e) = &r.result {
            manifest.notes.push((format!("cell_error[{i}]"), e.to_string()));
        }
    }
    manifest.write(w)?;
    writeln!(w, "{SWEEP_HEADER}")?;
    let mut line = String::new();
    for r in rows {
        line.clear();
        write!(line, "{},{}", r.axis1, opt(r.axis2)).unwrap();
        match &r.result {
            Ok(s) => write!(
                line,
                ",{},{},{},{},{},{},{},{}",
                s.p_global,
                s.p_global_se,
                opt(s.time.map(|e| e.mean)),
                opt(s.time.map(|e| e.se)),
                opt(s.energy.map(|e| e.mean)),
                opt(s.energy.map(|e| e.se)),
                s.n_success,
                s.n_runs
            )
            .unwrap(),
            Err(_) => line.push_str(",,,,,,,,"),
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub const TRANSITION_HEADER: &str = "phi,r_lower,r_upper";

/// Per-threshold window edges plus the scaling slope in the manifest.
pub fn emit_transition_csv<W: Write + ?Sized>(
    rows: &[TransitionRow],
    slope: Option<f64>,
    manifest: &RunManifest,
    w: &mut W,
) -> io::Result<()> {
    let mut manifest = manifest.clone();
    manifest.rows = rows.len();
    manifest
        .notes
        .push(("upper_boundary_slope".into(), opt(slope)));
    manifest.write(w)?;
    writeln!(w, "{TRANSITION_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.phi, opt(r.lower), opt(r.upper))?;
    }
    Ok(())
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn write_file<F>(path: &Path, body: F) -> io::Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()
}

/// Drops the wall-clock line so reruns can be compared byte for byte.
pub fn strip_wall_clock(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with(WALL_CLOCK_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::montecarlo::{Estimate, ReplicateStats};

    fn stats() -> ReplicateStats {
        ReplicateStats {
            n_runs: 10,
            n_success: 4,
            n_infeasible: 0,
            p_global: 0.4,
            p_global_se: (0.4f64 * 0.6 / 10.0).sqrt(),
            time: Some(Estimate { mean: 120.5, se: 3.25 }),
            time_to_cutoff: None,
            energy: Some(Estimate { mean: 2.5e6, se: 1234.5 }),
            predicted_energy: None,
            final_fraction: None,
            long_link_length: None,
        }
    }

    #[test]
    fn one_cell_table() {
        let rows = vec![SweepRow { axis1: 0.12, axis2: Some(16.0), result: Ok(stats()) }];
        let m = RunManifest::new("sweep", &ExperimentConfig::default());
        let mut buf = Vec::new();
        emit_sweep_csv(&rows, &m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 2);
        assert_eq!(data[0], SWEEP_HEADER);
        assert_eq!(data[1], format!("0.12,16,0.4,{},120.5,3.25,2500000,1234.5,4,10", (0.024f64).sqrt()));
        assert!(text.starts_with("# geocascade"));
        assert!(text.contains("# rows: 1\n"));
    }

    #[test]
    fn failed_cell_and_missing_values() {
        let mut s = stats();
        s.time = None;
        s.energy = None;
        let rows = vec![
            SweepRow { axis1: 1.0, axis2: None, result: Ok(s) },
            SweepRow { axis1: 2.0, axis2: None, result: Err(Error::NoLongRangeLinks) },
        ];
        let mut buf = Vec::new();
        emit_sweep_csv(&rows, &RunManifest::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# cell_error[1]: network has no long-range links"));
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(data, vec!["1,,0.4,0.15491933384829668,,,,,4,10", "2,,,,,,,,,"]);
        assert!(data.iter().all(|l| l.split(',').count() == 10));
    }

    #[test]
    fn wall_clock_is_the_only_varying_line() {
        let mut a = RunManifest::new("run", &ExperimentConfig::default());
        let mut b = a.clone();
        a.wall_clock_seconds = 1.0;
        b.wall_clock_seconds = 2.5;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write(&mut x).unwrap();
        b.write(&mut y).unwrap();
        assert_ne!(x, y);
        let (x, y) = (String::from_utf8(x).unwrap(), String::from_utf8(y).unwrap());
        assert_eq!(strip_wall_clock(&x), strip_wall_clock(&y));
    }
}
