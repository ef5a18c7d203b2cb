//! Replay of a timestamped citation dataset as a growth sequence.
//!
//! Input is the SNAP layout: an edge file of whitespace-separated
//! `citing cited` id pairs and a dates file of `id<TAB>YYYY-MM-DD` lines,
//! both with `#` comments. The seed holds every paper dated on or before a
//! cutoff plus the papers they cite; the remaining dated papers arrive one
//! per step in date order (ties by ascending id). An arrival's citees that
//! are not yet in the network enter at that step with in-degree 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{AttachmentRecord, SampleLog, SeedSpec};

pub type PaperId = u64;

/// Cleaned citation edges and publication dates.
#[derive(Clone, Debug, Default)]
pub struct CitationDataset {
    edges: Vec<(PaperId, PaperId)>,
    dates: HashMap<PaperId, NaiveDate>,
    papers: BTreeSet<PaperId>,
}

/// What cleaning removed while loading.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub raw_edges: usize,
    pub duplicate_edges: usize,
    pub self_citations: usize,
    /// Edges dropped because the citing paper has no date.
    pub undated_citing_edges: usize,
    /// Undated papers that are never cited and so vanish with their edges.
    pub dropped_papers: usize,
    pub date_entries: usize,
    /// Repeated ids in the dates file; the earliest date is kept.
    pub duplicate_dates: usize,
}

impl CitationDataset {
    pub fn edges(&self) -> &[(PaperId, PaperId)] {
        &self.edges
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn citation_count(&self) -> usize {
        self.edges.len()
    }

    pub fn date(&self, id: PaperId) -> Option<NaiveDate> {
        self.dates.get(&id).copied()
    }

    /// Papers that appear in at least one kept edge.
    pub fn papers(&self) -> &BTreeSet<PaperId> {
        &self.papers
    }

    pub fn from_readers<E: BufRead, D: BufRead>(
        edges: E,
        edges_name: &str,
        dates: D,
        dates_name: &str,
    ) -> Result<(Self, LoadReport)> {
        let mut report = LoadReport::default();
        let dates = read_dates(dates, dates_name, &mut report)?;

        let mut seen = BTreeSet::new();
        let mut raw = Vec::new();
        for (i, line) in edges.lines().enumerate() {
            let line = line?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut it = body.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::parse(edges_name, i + 1, "expected `citing cited`"));
            };
            let a = parse_id(a).map_err(|m| Error::parse(edges_name, i + 1, m))?;
            let b = parse_id(b).map_err(|m| Error::parse(edges_name, i + 1, m))?;
            report.raw_edges += 1;
            if a == b {
                report.self_citations += 1;
                continue;
            }
            if !seen.insert((a, b)) {
                report.duplicate_edges += 1;
                continue;
            }
            raw.push((a, b));
        }

        let cited: BTreeSet<PaperId> = raw.iter().map(|&(_, b)| b).collect();
        let mut undated_citing = BTreeSet::new();
        let mut kept = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            if dates.contains_key(&a) {
                kept.push((a, b));
            } else {
                report.undated_citing_edges += 1;
                undated_citing.insert(a);
            }
        }
        report.dropped_papers = undated_citing.iter().filter(|id| !cited.contains(id)).count();

        let papers = kept.iter().flat_map(|&(a, b)| [a, b]).collect();
        Ok((
            Self {
                edges: kept,
                dates,
                papers,
            },
            report,
        ))
    }
}

fn parse_id(token: &str) -> std::result::Result<PaperId, String> {
    token.parse::<PaperId>().map_err(|e| format!("bad paper id `{token}`: {e}"))
}

fn read_dates<D: BufRead>(input: D, name: &str, report: &mut LoadReport) -> Result<HashMap<PaperId, NaiveDate>> {
    let mut dates: HashMap<PaperId, NaiveDate> = HashMap::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut it = body.split_whitespace();
        let (Some(id), Some(date), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(name, i + 1, "expected `id<TAB>YYYY-MM-DD`"));
        };
        let id = parse_id(id).map_err(|m| Error::parse(name, i + 1, m))?;
        let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|e| Error::parse(name, i + 1, format!("bad date `{date}`: {e}")))?;
        report.date_entries += 1;
        match dates.get_mut(&id) {
            Some(existing) => {
                report.duplicate_dates += 1;
                if date < *existing {
                    *existing = date;
                }
            }
            None => {
                dates.insert(id, date);
            }
        }
    }
    Ok(dates)
}

pub fn load_dataset(edge_path: &Path, dates_path: &Path) -> Result<(CitationDataset, LoadReport)> {
    let edges = std::io::BufReader::new(std::fs::File::open(edge_path)?);
    let dates = std::io::BufReader::new(std::fs::File::open(dates_path)?);
    CitationDataset::from_readers(
        edges,
        &edge_path.display().to_string(),
        dates,
        &dates_path.display().to_string(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrival {
    pub id: PaperId,
    pub date: NaiveDate,
    /// Cited papers, ascending by id.
    pub citees: Vec<PaperId>,
}

#[derive(Clone, Debug)]
pub struct ReplaySequence {
    pub seed: SeedSpec,
    pub arrivals: Vec<Arrival>,
    /// Dataset edges that neither lie inside the seed nor leave an arrival.
    pub unreplayed_edges: usize,
}

/// Splits the dataset at `seed_cutoff` (inclusive).
pub fn build_replay(ds: &CitationDataset, seed_cutoff: NaiveDate) -> Result<ReplaySequence> {
    let mut cites: BTreeMap<PaperId, Vec<PaperId>> = BTreeMap::new();
    for &(a, b) in &ds.edges {
        cites.entry(a).or_default().push(b);
    }
    for list in cites.values_mut() {
        list.sort_unstable();
    }

    let mut seed_nodes: BTreeSet<PaperId> = BTreeSet::new();
    for &id in &ds.papers {
        if ds.date(id).is_some_and(|d| d <= seed_cutoff) {
            seed_nodes.insert(id);
            if let Some(list) = cites.get(&id) {
                seed_nodes.extend(list.iter().copied());
            }
        }
    }
    if seed_nodes.is_empty() {
        return Err(Error::Domain(format!("no papers dated on or before {seed_cutoff}: empty seed")));
    }

    let labels: Vec<PaperId> = seed_nodes.iter().copied().collect();
    let index: HashMap<PaperId, u32> = labels.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
    let mut seed_edges = Vec::new();
    for &(a, b) in &ds.edges {
        if let (Some(&u), Some(&v)) = (index.get(&a), index.get(&b)) {
            seed_edges.push((u, v));
        }
    }
    seed_edges.sort_unstable();
    if seed_edges.is_empty() {
        return Err(Error::Domain("seed network has no edges".into()));
    }
    let seed = SeedSpec::with_labels(labels, seed_edges)?;

    let mut arrivals: Vec<Arrival> = ds
        .papers
        .iter()
        .filter(|id| !seed_nodes.contains(id))
        .filter_map(|&id| {
            ds.date(id).map(|date| Arrival {
                id,
                date,
                citees: cites.get(&id).cloned().unwrap_or_default(),
            })
        })
        .collect();
    arrivals.sort_by_key(|a| (a.date, a.id));

    let replayed: usize = seed.edge_count() + arrivals.iter().map(|a| a.citees.len()).sum::<usize>();
    Ok(ReplaySequence {
        seed,
        arrivals,
        unreplayed_edges: ds.edges.len() - replayed,
    })
}

/// Counts describing a replay.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReplayManifest {
    pub seed_nodes: usize,
    pub seed_edges: usize,
    pub arrivals: usize,
    pub final_nodes: usize,
    pub final_edges: usize,
    pub records: usize,
    pub zero_in_degree_records: usize,
    /// Arrivals that were already present because an earlier paper cited them.
    pub preexisting_arrivals: usize,
    pub unreplayed_edges: usize,
    pub mean_citations_per_arrival: f64,
    pub median_citations_per_arrival: f64,
}

#[derive(Clone, Debug)]
pub struct Replay {
    pub log: SampleLog,
    pub manifest: ReplayManifest,
    /// In-degree of every node of the final network.
    pub final_in_degrees: Vec<u64>,
}

/// Replays the arrivals, logging one record per citation: the citee's
/// in-degree before the arrival (0 if it is new) with the pre-arrival
/// edge and node counts.
pub fn replay_to_samplelog(seq: &ReplaySequence) -> Replay {
    let mut index: HashMap<PaperId, usize> = HashMap::with_capacity(seq.seed.node_count() + seq.arrivals.len());
    let mut in_degree: Vec<u64> = seq.seed.in_degrees().into_iter().map(u64::from).collect();
    for (i, &id) in seq.seed.labels().iter().enumerate() {
        index.insert(id, i);
    }
    let mut edges = seq.seed.edge_count() as u64;
    let total_citations: usize = seq.arrivals.iter().map(|a| a.citees.len()).sum();
    let mut log = SampleLog::with_capacity(seq.arrivals.len(), total_citations);
    let mut step = Vec::new();
    let mut zero_records = 0;
    let mut preexisting = 0;

    for arrival in &seq.arrivals {
        let n_prev = in_degree.len() as u64;
        step.clear();
        for citee in &arrival.citees {
            let k = index.get(citee).map_or(0, |&i| in_degree[i]);
            if k == 0 {
                zero_records += 1;
            }
            step.push(AttachmentRecord::new(k, edges, n_prev));
        }
        log.push_step(&step);

        if index.contains_key(&arrival.id) {
            preexisting += 1;
        } else {
            index.insert(arrival.id, in_degree.len());
            in_degree.push(0);
        }
        for citee in &arrival.citees {
            let i = *index.entry(*citee).or_insert_with(|| {
                in_degree.push(0);
                in_degree.len() - 1
            });
            in_degree[i] += 1;
        }
        edges += arrival.citees.len() as u64;
    }

    let mut counts: Vec<usize> = seq.arrivals.iter().map(|a| a.citees.len()).collect();
    counts.sort_unstable();
    let median = match counts.len() {
        0 => 0.0,
        n if n % 2 == 1 => counts[n / 2] as f64,
        n => (counts[n / 2 - 1] + counts[n / 2]) as f64 / 2.0,
    };
    let mean = if counts.is_empty() {
        0.0
    } else {
        total_citations as f64 / counts.len() as f64
    };

    let manifest = ReplayManifest {
        seed_nodes: seq.seed.node_count(),
        seed_edges: seq.seed.edge_count(),
        arrivals: seq.arrivals.len(),
        final_nodes: in_degree.len(),
        final_edges: edges as usize,
        records: log.num_records(),
        zero_in_degree_records: zero_records,
        preexisting_arrivals: preexisting,
        unreplayed_edges: seq.unreplayed_edges,
        mean_citations_per_arrival: mean,
        median_citations_per_arrival: median,
    };
    Replay {
        log,
        manifest,
        final_in_degrees: in_degree,
    }
}
