//! On-disk formats: genome documents (TOML), archive directories
//! (`archive.toml` + `manifest.csv` + `genomes/*.toml`) and the
//! per-generation statistics log (CSV).

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{GenerationStats, Individual, ObjectiveSet, ObjectiveVector, ParetoArchive};
use crate::snn::{DecoderParams, Genome, NeuronParams};

pub const GENOME_FORMAT_VERSION: u32 = 1;
pub const ARCHIVE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct GenomeDocRef<'a> {
    format_version: u32,
    n_hidden: usize,
    w_in: &'a [Vec<f64>],
    w_out: &'a [f64],
    output_params: &'a NeuronParams,
    decoder: &'a DecoderParams,
    hidden_params: &'a [NeuronParams],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenomeDoc {
    format_version: u32,
    n_hidden: usize,
    w_in: Vec<Vec<f64>>,
    w_out: Vec<f64>,
    output_params: NeuronParams,
    decoder: DecoderParams,
    #[serde(default)]
    hidden_params: Vec<NeuronParams>,
}

pub fn genome_to_toml(genome: &Genome) -> String {
    let doc = GenomeDocRef {
        format_version: GENOME_FORMAT_VERSION,
        n_hidden: genome.n_hidden,
        w_in: &genome.w_in,
        w_out: &genome.w_out,
        output_params: &genome.output_params,
        decoder: &genome.decoder,
        hidden_params: &genome.hidden_params,
    };
    toml::to_string(&doc).expect("genome documents always serialize")
}

/// Parses and validates a genome document. `origin` only labels errors.
pub fn genome_from_toml(text: &str, origin: &Path) -> Result<Genome> {
    let doc: GenomeDoc = toml::from_str(text).map_err(|e| Error::parse(origin, e))?;
    if doc.format_version != GENOME_FORMAT_VERSION {
        return Err(Error::parse(origin, format!("unsupported genome format version {}", doc.format_version)));
    }
    let genome = Genome {
        n_hidden: doc.n_hidden,
        w_in: doc.w_in,
        w_out: doc.w_out,
        hidden_params: doc.hidden_params,
        output_params: doc.output_params,
        decoder: doc.decoder,
    };
    genome.validate().map_err(|e| Error::parse(origin, e))?;
    Ok(genome)
}

pub fn save_genome(genome: &Genome, path: &Path) -> Result<()> {
    fs::write(path, genome_to_toml(genome)).map_err(|e| Error::io(path, e))
}

pub fn load_genome(path: &Path) -> Result<Genome> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    genome_from_toml(&text, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ArchiveMeta {
    format_version: u32,
    selection_objectives: Vec<String>,
    members: usize,
}

/// An archive member together with the master seed of the run that bred it.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchivedMember {
    pub individual: Individual,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredArchive {
    pub objectives: ObjectiveSet,
    pub members: Vec<ArchivedMember>,
}

impl StoredArchive {
    pub fn from_archive(archive: &ParetoArchive, seed: u64) -> Self {
        StoredArchive {
            objectives: archive.objective_set(),
            members: archive.members().iter().map(|i| ArchivedMember { individual: i.clone(), seed }).collect(),
        }
    }

    pub fn to_archive(&self) -> Result<ParetoArchive> {
        let mut a = ParetoArchive::new(self.objectives);
        a.absorb(self.members.iter().map(|m| m.individual.clone()))?;
        Ok(a)
    }
}

const MANIFEST_HEADER: [&str; 9] = ["id", "f1", "f2", "f3", "f4", "lineage", "generation", "seed", "genome"];

fn genome_file(id: u64) -> String {
    format!("genomes/{id}.toml")
}

/// Writes an archive directory. Members are listed in archive order.
pub fn save_archive(archive: &StoredArchive, dir: &Path) -> Result<()> {
    let genome_dir = dir.join("genomes");
    fs::create_dir_all(&genome_dir).map_err(|e| Error::io(&genome_dir, e))?;
    let meta = ArchiveMeta {
        format_version: ARCHIVE_FORMAT_VERSION,
        selection_objectives: archive.objectives.names().iter().map(|s| s.to_string()).collect(),
        members: archive.members.len(),
    };
    let meta_path = dir.join("archive.toml");
    fs::write(&meta_path, toml::to_string(&meta).expect("archive metadata serializes"))
        .map_err(|e| Error::io(&meta_path, e))?;

    let manifest_path = dir.join("manifest.csv");
    let file = fs::File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| Error::io(&manifest_path, e.into());
    w.write_record(MANIFEST_HEADER).map_err(csv_err)?;
    for m in &archive.members {
        let ind = &m.individual;
        let rel = genome_file(ind.id);
        save_genome(&ind.genome, &dir.join(&rel))?;
        let mut row = vec![ind.id.to_string()];
        match ind.objectives {
            Some(o) => row.extend(o.0.iter().map(f64::to_string)),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        row.push(ind.parent.map(|p| p.to_string()).unwrap_or_default());
        row.push(ind.generation.to_string());
        row.push(m.seed.to_string());
        row.push(rel);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&manifest_path, e))
}

fn parse_field<T: std::str::FromStr>(field: &str, what: &str, path: &Path) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field.parse().map_err(|e| Error::parse(path, format!("bad {what} {field:?}: {e}")))
}

pub fn load_archive(dir: &Path) -> Result<StoredArchive> {
    let meta_path = dir.join("archive.toml");
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: ArchiveMeta = toml::from_str(&meta_text).map_err(|e| Error::parse(&meta_path, e))?;
    if meta.format_version != ARCHIVE_FORMAT_VERSION {
        return Err(Error::parse(&meta_path, format!("unsupported archive format version {}", meta.format_version)));
    }
    let objectives = match meta.selection_objectives.len() {
        4 => ObjectiveSet::ALL,
        3 => ObjectiveSet::WITHOUT_SPIKES,
        n => return Err(Error::parse(&meta_path, format!("{n} selection objectives"))),
    };

    let manifest_path = dir.join("manifest.csv");
    let mut reader = csv::Reader::from_path(&manifest_path).map_err(|e| Error::parse(&manifest_path, e))?;
    let header = reader.headers().map_err(|e| Error::parse(&manifest_path, e))?.clone();
    if header.iter().ne(MANIFEST_HEADER) {
        return Err(Error::parse(&manifest_path, "unexpected manifest header"));
    }
    let mut members = Vec::new();
    for record in reader.records() {
        let rec = record.map_err(|e| Error::parse(&manifest_path, e))?;
        let p = &manifest_path;
        let id: u64 = parse_field(&rec[0], "id", p)?;
        let objectives = if rec[1].is_empty() {
            None
        } else {
            let mut v = [0.0; 4];
            for (k, slot) in v.iter_mut().enumerate() {
                *slot = parse_field(&rec[1 + k], "objective", p)?;
            }
            Some(ObjectiveVector(v))
        };
        let parent = if rec[5].is_empty() { None } else { Some(parse_field(&rec[5], "lineage", p)?) };
        let generation = parse_field(&rec[6], "generation", p)?;
        let seed = parse_field(&rec[7], "seed", p)?;
        let genome = load_genome(&dir.join(&rec[8]))?;
        members.push(ArchivedMember {
            individual: Individual { id, genome: Arc::new(genome), objectives, parent, generation },
            seed,
        });
    }
    if members.len() != meta.members {
        return Err(Error::parse(&manifest_path, format!("{} rows, metadata says {}", members.len(), meta.members)));
    }
    Ok(StoredArchive { objectives, members })
}

/// Union of stored archives re-pruned to the non-dominated set.
///
/// Members keep their ids unless another kept member already uses it, in
/// which case they are renumbered past the largest id in use.
pub fn merge_archives(archives: &[StoredArchive]) -> Result<StoredArchive> {
    let first = archives.first().ok_or_else(|| Error::InvalidInput("nothing to merge".into()))?;
    let objectives = first.objectives;
    if archives.iter().any(|a| a.objectives != objectives) {
        return Err(Error::InvalidInput("archives were selected on different objectives".into()));
    }
    let all: Vec<&ArchivedMember> = archives.iter().flat_map(|a| &a.members).collect();
    let mut pruned = ParetoArchive::new(objectives);
    pruned.absorb(all.iter().map(|m| m.individual.clone()))?;

    let mut next_id = all.iter().map(|m| m.individual.id).max().map_or(0, |m| m + 1);
    let mut used = HashSet::new();
    let members = pruned
        .members()
        .iter()
        .map(|kept| {
            let source = all
                .iter()
                .find(|m| Arc::ptr_eq(&m.individual.genome, &kept.genome))
                .expect("kept member comes from an input");
            let mut individual = kept.clone();
            if !used.insert(individual.id) {
                individual.id = next_id;
                used.insert(next_id);
                next_id += 1;
            }
            ArchivedMember { individual, seed: source.seed }
        })
        .collect();
    Ok(StoredArchive { objectives, members })
}

/// Appends per-generation statistics to a CSV file.
pub struct GenerationLog {
    writer: csv::Writer<fs::File>,
    path: PathBuf,
}

impl GenerationLog {
    pub const HEADER: [&'static str; 11] = [
        "generation",
        "evaluated",
        "archive_size",
        "f1_best",
        "f2_best",
        "f3_best",
        "f4_best",
        "f1_median",
        "f2_median",
        "f3_median",
        "f4_median",
    ];

    pub fn create(path: &Path) -> Result<Self> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut log = GenerationLog { writer: csv::Writer::from_writer(file), path: path.to_path_buf() };
        log.write(Self::HEADER.iter().map(|s| s.to_string()).collect())?;
        Ok(log)
    }

    fn write(&mut self, row: Vec<String>) -> Result<()> {
        self.writer.write_record(&row).map_err(|e| Error::io(&self.path, e.into()))?;
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }

    pub fn append(&mut self, stats: &GenerationStats) -> Result<()> {
        let mut row = vec![stats.generation.to_string(), stats.evaluated.to_string(), stats.archive_size.to_string()];
        row.extend(stats.best.iter().chain(&stats.median).map(f64::to_string));
        self.write(row)
    }
}

/// Writes a CSV produced by `f` to `path`.
pub fn write_table<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f(&mut file).map_err(|e| Error::io(path, e))
}
