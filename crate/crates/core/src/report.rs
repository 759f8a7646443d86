//! Output files of a selection run and of an evaluation.
//!
//! All tables are tab-separated with a header row and a fixed column order;
//! real numbers use 10 significant digits.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::format::fmt10;
use crate::harness::wrapper::{parse_verdict_word, PredictionKey, SelectionQuality};
use crate::selector::{PartitionReport, SelectOptions, SelectionReport};

pub const MANIFEST: &str = "manifest.tsv";
pub const TIMING: &str = "timing.tsv";
pub const EVALUATION: &str = "evaluation.tsv";

const CLASSIFIER_PREFIX: &str = "classifier_";
const CLASSIFIER_HEADER: &str = "subset\tf1\tf2\tf3\tf4\tf5\tf6\tz1\tz2\tz3\tz4\tz5\tz6\tlin_pred\tlog_pred\tverdict";

pub fn classifier_file_name(partition: &str) -> String {
    format!("{CLASSIFIER_PREFIX}{partition}.tsv")
}

pub fn selected_file_name(partition: &str) -> String {
    format!("selected_{partition}.txt")
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, w: BufWriter<fs::File>) -> Result<()> {
    w.into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?
        .sync_all()
        .map_err(|e| Error::io(path, e))
}

pub fn write_classifier_table(p: &PartitionReport, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{CLASSIFIER_HEADER}")?;
    for r in &p.results {
        let z = r.profile.z.unwrap_or([0.0; 6]);
        let mut fields = vec![r.subset.to_string()];
        fields.extend(r.profile.raw.iter().map(|&v| fmt10(v)));
        fields.extend(z.iter().map(|&v| fmt10(v)));
        fields.push(fmt10(r.verdict.lin_pred));
        fields.push(fmt10(r.verdict.log_pred));
        fields.push(if r.verdict.optimal { "optimal" } else { "suboptimal" }.to_string());
        writeln!(w, "{}", fields.join("\t"))?;
    }
    Ok(())
}

/// Writes per-classifier tables, selected-subset lists and the manifest.
/// `timing` additionally writes per-subset wall times, which differ between
/// runs.
pub fn write_selection(report: &SelectionReport, opts: &SelectOptions, out_dir: &Path, timing: bool) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    for p in &report.partitions {
        let name = p.partition.canonical_name();

        let path = out_dir.join(classifier_file_name(&name));
        let mut w = create(&path)?;
        write_classifier_table(p, &mut w).map_err(|e| Error::io(&path, e))?;
        finish(&path, w)?;

        let path = out_dir.join(selected_file_name(&name));
        let mut w = create(&path)?;
        for r in p.selected() {
            writeln!(w, "{}", r.subset).map_err(|e| Error::io(&path, e))?;
        }
        finish(&path, w)?;
    }

    if timing {
        let path = out_dir.join(TIMING);
        let mut w = create(&path)?;
        let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
            writeln!(w, "partition\tsubset\tcolumns\tseconds")?;
            for p in &report.partitions {
                let name = p.partition.canonical_name();
                for r in &p.results {
                    writeln!(
                        w,
                        "{name}\t{}\t{}\t{}",
                        r.subset,
                        r.profile.dims.ambient_full,
                        fmt10(r.elapsed.as_secs_f64())
                    )?;
                }
                writeln!(w, "{name}\t*\t*\t{}", fmt10(p.elapsed().as_secs_f64()))?;
            }
            Ok(())
        };
        write(&mut w).map_err(|e| Error::io(&path, e))?;
        finish(&path, w)?;
    }

    // manifest last
    let path = out_dir.join(MANIFEST);
    let mut w = create(&path)?;
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "# f6_mode\t{}", opts.f6_mode)?;
        writeln!(
            w,
            "# tolerance\t{:?}\t{}",
            opts.tolerance.policy(),
            opts.tolerance.epsilon()
        )?;
        writeln!(w, "partition\tsubsets\tselected\tfile")?;
        let mut total = 0;
        let mut selected = 0;
        for p in &report.partitions {
            let name = p.partition.canonical_name();
            let s = p.selected().count();
            total += p.results.len();
            selected += s;
            writeln!(w, "{name}\t{}\t{s}\t{}", p.results.len(), classifier_file_name(&name))?;
        }
        writeln!(w, "total\t{total}\t{selected}\t-")
    };
    write(&mut w).map_err(|e| Error::io(&path, e))?;
    finish(&path, w)
}

/// Reads verdicts back from the classifier tables in `dir`.
pub fn read_predictions(dir: &Path) -> Result<BTreeMap<PredictionKey, bool>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with(CLASSIFIER_PREFIX) && n.ends_with(".tsv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::MissingInput(dir.join(format!("{CLASSIFIER_PREFIX}*.tsv"))));
    }
    let mut out = BTreeMap::new();
    for path in files {
        let name = path.file_name().and_then(|n| n.to_str()).expect("utf-8 name");
        let partition = name[CLASSIFIER_PREFIX.len()..name.len() - 4].to_string();
        let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            if i == 0 || line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || Error::Parse {
                line: i + 1,
                msg: format!("malformed row in {}", path.display()),
            };
            if fields.len() != 16 {
                return Err(bad());
            }
            let verdict = parse_verdict_word(fields[15]).ok_or_else(bad)?;
            out.insert((partition.clone(), fields[0].to_string()), verdict);
        }
    }
    Ok(out)
}

pub fn write_evaluation(q: &SelectionQuality, mut w: impl Write) -> Result<()> {
    let mut rows = Vec::new();
    for (name, counts) in &q.per_partition {
        rows.push((name.as_str(), *counts));
    }
    rows.push(("overall", q.overall));
    let mut text = String::from("scope\ttp\tfp\ttn\tfn\taccuracy\tprecision\trecall\tf1\n");
    for (scope, c) in rows {
        let m = c.metrics()?;
        text.push_str(&format!(
            "{scope}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            c.tp,
            c.fp,
            c.tn,
            c.fn_,
            fmt10(m.accuracy),
            fmt10(m.precision),
            fmt10(m.recall),
            fmt10(m.f1)
        ));
    }
    w.write_all(text.as_bytes()).map_err(|e| Error::io(EVALUATION, e))
}
