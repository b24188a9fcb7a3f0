//! Experiment runners producing row-oriented datasets.

use rabisqueeze::model::{dispersive_spectrum, ground_squeezing, rabi_spectrum, ModelParams};
use rabisqueeze::openquantum::{gamma_per_dt_plus, run_jitter_ensemble, run_noisy_protocol, NoiseConfig};
use rabisqueeze::protocol::{run_protocol, ProtocolConfig};
use rabisqueeze::{Error, FockSpace};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    /// Absent value (skipped computation).
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

const PROTOCOL_COLUMNS: [&str; 6] = [
    "n_cycles",
    "s_db",
    "stderr_db",
    "variant",
    "gamma_dt_plus",
    "jitter_rel",
];

pub fn run(cfg: &ExperimentConfig) -> CliResult<Dataset> {
    let space = FockSpace::new(cfg.fock_dim)?;
    let (columns, rows) = match cfg.experiment {
        Experiment::Spectrum => spectrum(cfg, space)?,
        Experiment::GroundSqueezing => ground(cfg, space)?,
        Experiment::Protocol => protocol(cfg, space)?,
        Experiment::NoisyProtocol => noisy(cfg, space)?,
        Experiment::JitterEnsemble => jitter(cfg, space)?,
    };
    Ok(Dataset {
        metadata: metadata(cfg),
        columns,
        rows,
    })
}

fn metadata(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let mut m = vec![
        ("tool".to_string(), "rabisqueeze".to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("experiment".to_string(), cfg.experiment.to_string()),
        (
            "units".to_string(),
            "omega = 1, Omega = 1 + delta, gamma in 1/dt_plus, S in dB".to_string(),
        ),
    ];
    m.extend(cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)));
    m
}

type Table = (Vec<&'static str>, Vec<Vec<Cell>>);

fn spectrum(cfg: &ExperimentConfig, space: FockSpace) -> CliResult<Table> {
    let mut rows = Vec::new();
    for &delta in &cfg.delta {
        let p = ModelParams::from_ratios(cfg.g[0], delta)?;
        let rabi = rabi_spectrum(&p, space)?;
        let disp = dispersive_spectrum(&p, cfg.levels);
        for (k, (&a, level)) in rabi.eigenvalues.iter().zip(&disp).take(cfg.levels).enumerate() {
            let b = level.energy;
            rows.push(vec![
                Cell::Float(delta),
                Cell::Int(k as u64),
                Cell::Float(a),
                Cell::Float(b),
                Cell::Float((a - b).abs()),
            ]);
        }
    }
    Ok((
        vec![
            "delta_over_omega",
            "level",
            "e_rabi_over_omega",
            "e_disp_over_omega",
            "abs_error_over_omega",
        ],
        rows,
    ))
}

fn ground(cfg: &ExperimentConfig, space: FockSpace) -> CliResult<Table> {
    let mut rows = Vec::new();
    for &delta in &cfg.delta {
        for &g in &cfg.g {
            let head = [Cell::Float(g), Cell::Float(delta)];
            match ModelParams::from_ratios(g, delta) {
                Ok(p) => {
                    let s = ground_squeezing(&p, space)?;
                    let mut row = head.to_vec();
                    row.extend([s.disp_minus, s.disp_plus, s.rabi_approx, s.rabi_exact].map(Cell::Float));
                    row.push(Cell::Text(String::new()));
                    rows.push(row);
                }
                Err(e @ Error::Harmonicity { .. }) => {
                    let mut row = head.to_vec();
                    row.extend([Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing]);
                    row.push(Cell::Text(e.to_string()));
                    rows.push(row);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok((
        vec![
            "g_over_omega",
            "delta_over_omega",
            "s_disp_minus_db",
            "s_disp_plus_db",
            "s_rabi_approx_db",
            "s_rabi_exact_db",
            "reason",
        ],
        rows,
    ))
}

fn params(cfg: &ExperimentConfig) -> CliResult<ModelParams<f64>> {
    Ok(ModelParams::from_ratios(cfg.g[0], cfg.delta[0])?)
}

fn protocol_rows(rows: &mut Vec<Vec<Cell>>, s: &[f64], err: &[f64], variant: &str, gamma: f64, jitter: f64) {
    for (n, (s, e)) in s.iter().zip(err).enumerate() {
        rows.push(vec![
            Cell::Int(n as u64),
            Cell::Float(*s),
            Cell::Float(*e),
            Cell::Text(variant.to_string()),
            Cell::Float(gamma),
            Cell::Float(jitter),
        ]);
    }
}

fn protocol(cfg: &ExperimentConfig, space: FockSpace) -> CliResult<Table> {
    let p = params(cfg)?;
    let mut rows = Vec::new();
    for &v in &cfg.variants {
        let trace = run_protocol(&ProtocolConfig::new(v, cfg.cycles, p), space)?;
        protocol_rows(
            &mut rows,
            &trace.s_db(),
            &vec![0.0; cfg.cycles + 1],
            v.as_str(),
            0.0,
            0.0,
        );
    }
    Ok((PROTOCOL_COLUMNS.to_vec(), rows))
}

fn noise(cfg: &ExperimentConfig, p: &ModelParams<f64>, jitter: f64) -> CliResult<NoiseConfig<f64>> {
    Ok(
        NoiseConfig::new(gamma_per_dt_plus(p, cfg.gamma), jitter, cfg.ensemble_size, cfg.seed)?
            .with_jitter_mode(cfg.jitter_mode)
            .with_steps(cfg.steps_per_interval)?,
    )
}

fn noisy(cfg: &ExperimentConfig, space: FockSpace) -> CliResult<Table> {
    let p = params(cfg)?;
    let mut rows = Vec::new();
    let jitter = cfg.jitter_rel[0];
    for &v in &cfg.variants {
        let trace = run_noisy_protocol(&ProtocolConfig::new(v, cfg.cycles, p), &noise(cfg, &p, jitter)?, space)?;
        protocol_rows(
            &mut rows,
            &trace.s_db(),
            &vec![0.0; cfg.cycles + 1],
            v.as_str(),
            cfg.gamma,
            jitter,
        );
    }
    Ok((PROTOCOL_COLUMNS.to_vec(), rows))
}

fn jitter(cfg: &ExperimentConfig, space: FockSpace) -> CliResult<Table> {
    let p = params(cfg)?;
    let mut rows = Vec::new();
    for &v in &cfg.variants {
        for &j in &cfg.jitter_rel {
            let rep = run_jitter_ensemble(&ProtocolConfig::new(v, cfg.cycles, p), &noise(cfg, &p, j)?, space)?;
            protocol_rows(&mut rows, &rep.mean_s, &rep.stderr, v.as_str(), cfg.gamma, j);
        }
    }
    Ok((PROTOCOL_COLUMNS.to_vec(), rows))
}
