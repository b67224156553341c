//! Report files. Everything is rendered in memory first so a failed run
//! leaves the output directory untouched.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use serde::Serialize;

use phasetopo_core::analysis::{DynamicsSignature, SweepResult};
use phasetopo_core::quantum::OverlapMode;

use crate::config::{ResolvedConfig, Scheme};
use crate::pipeline::PipelineOutput;

pub const FILES: [&str; 5] = [
    "trajectory.csv",
    "overlaps.csv",
    "sweep.json",
    "signature.json",
    "betti_curves.csv",
];

/// Floats in CSV files: 17 significant digits, round-trip exact.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trajectory_csv(cfg: &ResolvedConfig, out: &PipelineOutput) -> String {
    let traj = &out.trajectory;
    let mut s = String::from("step,t,sampled");
    for i in 0..traj.dim() {
        write!(s, ",x{i}").unwrap();
    }
    s.push('\n');
    let mut next = cfg.sample_indices.iter().peekable();
    for (step, (t, x)) in traj.times().iter().zip(traj.states()).enumerate() {
        let sampled = next.next_if(|&&i| i == step).is_some();
        write!(s, "{step},{},{}", num(*t), u8::from(sampled)).unwrap();
        for v in x.iter() {
            write!(s, ",{}", num(*v)).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn overlaps_csv(out: &PipelineOutput) -> String {
    let d = &out.overlaps;
    let mut s = String::new();
    for i in 0..d.size() {
        let row: Vec<String> = (0..d.size()).map(|j| num(d.get(i, j))).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn betti_curves_csv(sweep: &SweepResult) -> String {
    let mut s = String::from("eps,r,s_r,betti,normalized,estimate\n");
    for (eps, e) in sweep.rows() {
        let estimate = e.estimate.map(num).unwrap_or_default();
        writeln!(s, "{},{},{},{},{},{estimate}", num(eps), e.r, e.s_r, e.betti, num(e.normalized)).unwrap();
    }
    s
}

#[derive(Serialize)]
struct SignatureFile<'a> {
    system: &'a str,
    scheme: Scheme,
    overlap_mode: OverlapMode,
    shots: u64,
    seed: u64,
    samples: usize,
    #[serde(flatten)]
    signature: &'a DynamicsSignature,
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn signature_json(cfg: &ResolvedConfig, out: &PipelineOutput) -> String {
    json(&SignatureFile {
        system: &cfg.name,
        scheme: cfg.scheme,
        overlap_mode: cfg.mode,
        shots: cfg.shots,
        seed: cfg.seed,
        samples: cfg.sample_indices.len(),
        signature: &out.signature,
    })
}

/// All report files as `(name, contents)`, in [`FILES`] order.
pub fn render(cfg: &ResolvedConfig, out: &PipelineOutput) -> Vec<(&'static str, String)> {
    let contents = [
        trajectory_csv(cfg, out),
        overlaps_csv(out),
        json(&out.sweep),
        signature_json(cfg, out),
        betti_curves_csv(&out.sweep),
    ];
    FILES.into_iter().zip(contents).collect()
}

/// Writes each file under a temporary name and renames it into place.
pub fn write_all(dir: &Path, files: &[(&'static str, String)]) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = |name: &str| dir.join(format!(".{name}.{}.tmp", std::process::id()));
    for (name, contents) in files {
        std::fs::write(tmp(name), contents)?;
    }
    for (name, _) in files {
        std::fs::rename(tmp(name), dir.join(name))?;
    }
    Ok(())
}
