use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use neurolander::analysis::{
    self, default_grid, evaluate_robustness, record_activity, steady_state_response, transient_response, ComparisonRow,
    ControllerSpec, EnvSource, RobustnessConfig, RobustnessReport, TransientConfig, P_FAST, P_SLOW,
};
use neurolander::env::EnvParams;
use neurolander::evolution::EvolutionRun;
use neurolander::persist::{
    load_archive, load_genome, merge_archives, save_archive, write_table, GenerationLog, StoredArchive,
};
use neurolander::Genome;

use crate::config::RunFile;
use crate::error::CliError;
use crate::Baseline;

/// Environment used by `--noise-free`: mid-range timestep and actuator lag,
/// one frame of delay.
const NOISE_FREE: EnvParams = EnvParams {
    delay_steps: 1,
    sigma_d: 0.0,
    sigma_d_prop: 0.0,
    tau_thrust: 0.02,
    dt: 0.025,
    p_jitter: 0.0,
    sigma_wind: 0.0,
};

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Refuses to write an archive over an existing one.
fn fresh_archive_dir(dir: &Path) -> Result<(), CliError> {
    if dir.join("archive.toml").exists() {
        return Err(CliError::Usage(format!("{} already holds an archive; choose another --out", dir.display())));
    }
    Ok(())
}

fn env_source(settings: &RunFile) -> EnvSource {
    if settings.noise_free.unwrap_or(false) {
        EnvSource::Fixed(NOISE_FREE)
    } else {
        EnvSource::Randomized
    }
}

pub fn evolve(settings: &RunFile) -> Result<(), CliError> {
    let config = settings.evolution()?;
    let out = settings.out();
    let archive_dir = out.join("archive");
    fresh_archive_dir(&archive_dir)?;
    create_dir(&out)?;

    let manifest = toml::to_string(&RunFile::manifest(&config))
        .map_err(|e| CliError::Config(format!("cannot serialize run settings: {e}")))?;
    let run_path = out.join("run.toml");
    fs::write(&run_path, manifest).map_err(|e| CliError::io(&run_path, e))?;

    let mut log = GenerationLog::create(&out.join("generations.csv"))?;
    let mut run = EvolutionRun::new(config)?;
    log.append(&run.history()[0])?;
    for _ in 0..config.generations {
        let stats = run.step()?;
        log.append(stats)?;
    }
    save_archive(&StoredArchive::from_archive(run.archive(), config.seed), &archive_dir)?;

    let best = run.archive().best().unwrap_or([f64::NAN; 4]);
    println!(
        "{} generations, {} archive members; best f1 {:.3} s, f2 {:.3} m, f3 {:.3} m/s, f4 {:.1} Hz",
        config.generations,
        run.archive().len(),
        best[0],
        best[1],
        best[2],
        best[3]
    );
    println!("wrote {}", out.display());
    Ok(())
}

/// Genomes named by file stem, or `member-<id>` for archive members.
/// Repeated names get a numeric suffix.
fn load_sources(genomes: &[PathBuf], archive: Option<&Path>) -> Result<Vec<(String, Genome)>, CliError> {
    let mut named = Vec::new();
    for path in genomes {
        let stem = path.file_stem().map_or_else(|| "genome".to_string(), |s| s.to_string_lossy().into_owned());
        named.push((stem, load_genome(path)?));
    }
    if let Some(dir) = archive {
        let stored = load_archive(&resolve_archive(dir))?;
        for m in stored.members {
            let genome = std::sync::Arc::unwrap_or_clone(m.individual.genome);
            named.push((format!("member-{}", m.individual.id), genome));
        }
    }
    let mut seen = HashSet::new();
    for (name, _) in named.iter_mut() {
        let base = name.clone();
        let mut k = 2;
        while !seen.insert(name.clone()) {
            *name = format!("{base}-{k}");
            k += 1;
        }
    }
    Ok(named)
}

fn require_genomes(genomes: &[PathBuf], archive: Option<&Path>) -> Result<Vec<(String, Genome)>, CliError> {
    let named = load_sources(genomes, archive)?;
    if named.is_empty() {
        return Err(CliError::Usage("no genomes given; use --genome or --archive".into()));
    }
    Ok(named)
}

/// Accepts either an archive directory or a run directory containing one.
fn resolve_archive(dir: &Path) -> PathBuf {
    let nested = dir.join("archive");
    if !dir.join("archive.toml").exists() && nested.join("archive.toml").exists() {
        nested
    } else {
        dir.to_path_buf()
    }
}

pub fn evaluate(settings: &RunFile, genomes: &[PathBuf], archive: Option<&Path>) -> Result<(), CliError> {
    let named = require_genomes(genomes, archive)?;
    let config = RobustnessConfig {
        landings: settings.landings(250)?,
        h0: settings.h0()?,
        seed: settings.seed(),
        envs: env_source(settings),
    };
    let out = settings.out();
    let landings_dir = out.join("landings");
    create_dir(&landings_dir)?;

    let mut reports: Vec<(String, RobustnessReport)> = Vec::with_capacity(named.len());
    for (name, genome) in named {
        let report = evaluate_robustness(&ControllerSpec::Snn(genome), &config)?;
        write_table(&landings_dir.join(format!("{name}.csv")), |w| report.write_landings_csv(w))?;
        println!(
            "{name}: success {:.3}, median time {:.2} s, median touchdown speed {:.3} m/s, median spike rate {:.1} Hz",
            report.success_rate,
            report.median_time(),
            report.median_speed(),
            report.median_spike_rate()
        );
        reports.push((name, report));
    }
    write_table(&out.join("robustness.csv"), |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(std::iter::once("controller").chain(RobustnessReport::CSV_HEADER))?;
        for (name, report) in &reports {
            csv.write_record(std::iter::once(name.clone()).chain(report.csv_fields()))?;
        }
        csv.flush()
    })?;
    println!("wrote {}", out.display());
    Ok(())
}

pub fn analyze(settings: &RunFile, genomes: &[PathBuf], archive: Option<&Path>) -> Result<(), CliError> {
    let named = require_genomes(genomes, archive)?;
    let landings = settings.landings(100)?;
    let h0 = settings.h0()?;
    let transient = TransientConfig {
        landings,
        h0,
        seed: settings.seed(),
        envs: env_source(settings),
        ..TransientConfig::default()
    };
    let (d_axis, dd_axis) = default_grid();
    let out = settings.out();

    for (name, genome) in named {
        let dir = out.join(&name);
        create_dir(&dir)?;
        let steady = steady_state_response(&genome, &d_axis, &dd_axis)?;
        write_table(&dir.join("steady_state.csv"), |w| steady.write_csv(w))?;
        let curve = transient_response(&ControllerSpec::Snn(genome.clone()), &transient)?;
        write_table(&dir.join("transient.csv"), |w| curve.write_csv(w))?;
        let activity = record_activity(&genome, landings, h0, settings.seed())?;
        write_table(&dir.join("activity.csv"), |w| activity.write_csv(w))?;
        println!("{name}: network spike rate {:.1} Hz over {landings} landings", activity.total_rate());
    }
    println!("wrote {}", out.display());
    Ok(())
}

pub fn compare(
    settings: &RunFile,
    genomes: &[PathBuf],
    archive: Option<&Path>,
    baselines: &[Baseline],
) -> Result<(), CliError> {
    let mut controllers: Vec<(String, ControllerSpec)> =
        load_sources(genomes, archive)?.into_iter().map(|(name, g)| (name, ControllerSpec::Snn(g))).collect();
    let baselines = if baselines.is_empty() { &[Baseline::PSlow, Baseline::PFast][..] } else { baselines };
    let mut added = HashSet::new();
    for b in baselines {
        if added.insert(*b) {
            controllers.push(match b {
                Baseline::PSlow => ("p-slow".into(), ControllerSpec::Proportional(P_SLOW)),
                Baseline::PFast => ("p-fast".into(), ControllerSpec::Proportional(P_FAST)),
            });
        }
    }
    let config = RobustnessConfig {
        landings: settings.landings(250)?,
        h0: settings.h0()?,
        seed: settings.seed(),
        envs: env_source(settings),
    };
    let rows = analysis::compare(&controllers, &config)?;
    let out = settings.out();
    create_dir(&out)?;
    write_table(&out.join("comparison.csv"), |w| ComparisonRow::write_csv(&rows, w))?;
    for r in &rows {
        println!(
            "{:<16} success {:.3}  time {:>6.2} s  speed {:.3} m/s  spikes {:.1} Hz",
            r.name, r.success_rate, r.median_time, r.median_speed, r.median_spike_rate
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

pub fn merge(settings: &RunFile, inputs: &[PathBuf]) -> Result<(), CliError> {
    let out = settings.out();
    let target = out.join("archive");
    let resolved: Vec<PathBuf> = inputs.iter().map(|d| resolve_archive(d)).collect();
    if let Ok(t) = fs::canonicalize(&target) {
        if resolved.iter().any(|d| fs::canonicalize(d).is_ok_and(|d| d == t)) {
            return Err(CliError::Usage("refusing to overwrite an input archive".into()));
        }
    }
    fresh_archive_dir(&target)?;
    let stored = resolved.iter().map(|d| load_archive(d)).collect::<Result<Vec<_>, _>>()?;
    let merged = merge_archives(&stored)?;
    save_archive(&merged, &target)?;
    let total: usize = stored.iter().map(|s| s.members.len()).sum();
    println!("merged {total} members from {} archives into {}", stored.len(), merged.members.len());
    println!("wrote {}", target.display());
    Ok(())
}
