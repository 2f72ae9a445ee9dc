//! Run records as CSV: `# key=value` metadata lines, a header row, then one
//! row per checkpoint. Floats use 17 significant digits; empty cells mean
//! "not recorded".

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenarios::{CheckpointRow, RunRecord};

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(record: &RunRecord) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..record.d).map(|i| format!("rbar_{i}")));
    h.extend((0..record.param_dim).map(|i| format!("mbar_{i}")));
    h.extend(record.metric_names.iter().map(|n| format!("dist_{n}")));
    h.extend(["gap", "bound", "delta_norm", "no_grouping"].map(String::from));
    h
}

/// Writes the record; wall-clock time, blocks and trajectory are not part of the file.
pub fn write_record(out: &mut impl Write, record: &RunRecord) -> Result<()> {
    let meta = [
        ("scenario", record.scenario.clone()),
        ("strategy", record.strategy.clone()),
        ("adversary", record.adversary.clone()),
        ("seed", record.seed.to_string()),
        ("horizon", record.horizon.to_string()),
        ("d", record.d.to_string()),
        ("param_dim", record.param_dim.to_string()),
        ("metrics", record.metric_names.join(";")),
        ("switch_rounds", join(&record.switch_rounds)),
    ];
    for (k, v) in meta {
        if v.contains('\n') {
            return Err(Error::InvalidInput(format!("metadata `{k}` contains a newline")));
        }
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(record))?;
    let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
    for row in &record.rows {
        let mut cells = vec![row.t.to_string()];
        cells.extend(row.r_bar.iter().copied().map(float));
        cells.extend(row.m_params.iter().copied().map(float));
        cells.extend(row.distances.iter().copied().map(float));
        cells.extend([opt(row.gap), opt(row.bound), float(row.delta_norm), opt(row.no_grouping)]);
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_string(record: &RunRecord) -> Result<String> {
    let mut buf = Vec::new();
    write_record(&mut buf, record)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

/// Writes to a temporary sibling file, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn save(path: &Path, record: &RunRecord) -> Result<()> {
    write_atomic(path, to_string(record)?.as_bytes())
}

fn parse_err(what: impl Into<String>) -> Error {
    Error::InvalidInput(format!("malformed run CSV: {}", what.into()))
}

/// Reads a record written by [`write_record`].
pub fn read_record(mut input: impl Read) -> Result<RunRecord> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut meta = std::collections::BTreeMap::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix("# ") else { break };
        let (k, v) = rest
            .trim_end_matches(['\n', '\r'])
            .split_once('=')
            .ok_or_else(|| parse_err("metadata line without `=`"))?;
        meta.insert(k.to_string(), v.to_string());
        body_start += line.len();
    }
    let get = |k: &str| meta.get(k).cloned().ok_or_else(|| parse_err(format!("missing `{k}`")));
    let num = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| parse_err(format!("bad `{k}`"))) };
    let list = |s: String| -> Vec<String> {
        if s.is_empty() {
            Vec::new()
        } else {
            s.split(';').map(str::to_string).collect()
        }
    };
    let d = num("d")?;
    let param_dim = num("param_dim")?;
    let metric_names = list(get("metrics")?);
    let switch_rounds = list(get("switch_rounds")?)
        .iter()
        .map(|s| s.parse().map_err(|_| parse_err("bad switch round")))
        .collect::<Result<Vec<usize>>>()?;
    let mut reader = csv::Reader::from_reader(text[body_start..].as_bytes());
    let expected_cols = 1 + d + param_dim + metric_names.len() + 4;
    if reader.headers()?.len() != expected_cols {
        return Err(parse_err("header width"));
    }
    let f = |s: &str| -> Result<f64> { s.parse().map_err(|_| parse_err(format!("bad number `{s}`"))) };
    let opt = |s: &str| -> Result<Option<f64>> { if s.is_empty() { Ok(None) } else { f(s).map(Some) } };
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() != expected_cols {
            return Err(parse_err("row width"));
        }
        let cells: Vec<&str> = rec.iter().collect();
        let floats = |range: std::ops::Range<usize>| cells[range].iter().map(|s| f(s)).collect::<Result<Vec<f64>>>();
        let mut at = 1;
        let r_bar = floats(at..at + d)?;
        at += d;
        let m_params = floats(at..at + param_dim)?;
        at += param_dim;
        let distances = floats(at..at + metric_names.len())?;
        at += metric_names.len();
        rows.push(CheckpointRow {
            t: cells[0].parse().map_err(|_| parse_err("bad t"))?,
            r_bar,
            m_params,
            distances,
            gap: opt(cells[at])?,
            bound: opt(cells[at + 1])?,
            delta_norm: f(cells[at + 2])?,
            no_grouping: opt(cells[at + 3])?,
        });
    }
    Ok(RunRecord {
        scenario: get("scenario")?,
        strategy: get("strategy")?,
        adversary: get("adversary")?,
        seed: get("seed")?.parse().map_err(|_| parse_err("bad seed"))?,
        horizon: num("horizon")?,
        d,
        param_dim,
        metric_names,
        rows,
        blocks: Vec::new(),
        switch_rounds,
        trajectory: None,
        wall_clock_secs: 0.0,
    })
}

pub fn load(path: &Path) -> Result<RunRecord> {
    read_record(fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(rows: Vec<CheckpointRow>) -> RunRecord {
        RunRecord {
            scenario: "example1".into(),
            strategy: "block[x*]".into(),
            adversary: "periodic[2xblocks]".into(),
            seed: 7,
            horizon: 100,
            d: 2,
            param_dim: 1,
            metric_names: vec!["phi_star".into(), "alpha:1,0".into()],
            rows,
            blocks: Vec::new(),
            switch_rounds: vec![12, 400],
            trajectory: None,
            wall_clock_secs: 0.0,
        }
    }

    fn finite() -> impl proptest::strategy::Strategy<Value = f64> {
        prop_oneof![-1e300f64..1e300, -1.0f64..1.0, Just(0.0), Just(f64::MIN_POSITIVE)]
    }

    proptest! {
        #[test]
        fn parse_inverts_emit(
            values in prop::collection::vec((finite(), finite(), finite(), finite(), finite(), finite(), proptest::option::of(finite()), proptest::option::of(finite())), 1..6)
        ) {
            let rows: Vec<CheckpointRow> = values
                .iter()
                .enumerate()
                .map(|(k, v)| CheckpointRow {
                    t: k + 1,
                    r_bar: vec![v.0, v.1],
                    m_params: vec![v.2],
                    distances: vec![v.3.abs(), v.4.abs()],
                    gap: v.6,
                    bound: v.6.map(|b| b.abs()),
                    delta_norm: v.5.abs(),
                    no_grouping: v.7,
                })
                .collect();
            let rec = record(rows);
            let text = to_string(&rec).unwrap();
            let back = read_record(text.as_bytes()).unwrap();
            prop_assert_eq!(&back, &rec);
            prop_assert_eq!(to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn layout() {
        let rec = record(vec![CheckpointRow {
            t: 1,
            r_bar: vec![1.0, 2.0],
            m_params: vec![0.5],
            distances: vec![0.0, 0.25],
            gap: None,
            bound: None,
            delta_norm: 0.0,
            no_grouping: None,
        }]);
        let text = to_string(&rec).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# scenario=example1");
        assert_eq!(lines[8], "# switch_rounds=12;400");
        assert_eq!(
            lines[9],
            "t,rbar_0,rbar_1,mbar_0,dist_phi_star,\"dist_alpha:1,0\",gap,bound,delta_norm,no_grouping"
        );
        assert!(lines[10].starts_with("1,1.0000000000000000e0,2.0000000000000000e0,5.0000000000000000e-1"));
        assert!(read_record("t\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn atomic_save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("run.csv");
        let rec = record(Vec::new());
        save(&path, &rec).unwrap();
        assert_eq!(load(&path).unwrap(), rec);
        assert!(!dir.path().join("sub").join("run.csv.tmp").exists());
    }
}
