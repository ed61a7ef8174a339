//! Sweep orchestration: grid expansion, bounded parallelism, and
//! incremental in-order output.

use std::io::Write;

use anyhow::{Context, Result};
use rayon::prelude::*;

use crate::config::{apply_path, RunConfig};
use crate::output::RowWriter;
use crate::run::{steady_record, Record};

/// Cartesian grid over the sweep axes, first axis outermost.
pub fn grid_points(config: &RunConfig) -> Result<Vec<Vec<(String, f64)>>> {
    let sweep = config
        .sweep
        .as_ref()
        .context("config has no `sweep` section")?;
    let axes: Vec<(String, Vec<f64>)> = sweep
        .axes
        .iter()
        .map(|a| (a.path.clone(), a.values()))
        .collect();
    let mut points: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for (path, values) in &axes {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for base in &points {
            for &v in values {
                let mut point = base.clone();
                point.push((path.clone(), v));
                next.push(point);
            }
        }
        points = next;
    }
    Ok(points)
}

fn configure_point(base: &RunConfig, point: &[(String, f64)]) -> Result<RunConfig> {
    let mut config = base.clone();
    config.sweep = None;
    for (path, value) in point {
        apply_path(&mut config, path, *value)?;
    }
    Ok(config)
}

fn axis_columns(point: &[(String, f64)]) -> Vec<(String, f64)> {
    point
        .iter()
        .map(|(path, v)| (path.replace('.', "_"), *v))
        .collect()
}

/// Run the sweep, writing records in grid order as chunks complete.
pub fn run_sweep<W: Write>(
    config: &RunConfig,
    workers: usize,
    writer: &mut RowWriter<W>,
) -> Result<usize> {
    let points = grid_points(config)?;
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;

    let mut columns: Option<Vec<String>> = None;
    let chunk_size = (workers * 4).max(1);
    for chunk in points.chunks(chunk_size) {
        let records: Vec<Record> = pool.install(|| {
            chunk
                .par_iter()
                .map(|point| {
                    let record = match configure_point(config, point) {
                        Ok(cfg) => steady_record(&cfg, &axis_columns(point)),
                        Err(e) => {
                            let mut r = Record { fields: Vec::new() };
                            for (name, v) in axis_columns(point) {
                                r.fields.push((name, crate::output::Value::Number(v)));
                            }
                            r.fields.push((
                                "status".into(),
                                crate::output::Value::Text(format!("error: {e:#}")),
                            ));
                            r
                        }
                    };
                    record
                })
                .collect()
        });
        for record in records {
            let cols = columns.get_or_insert_with(|| record.columns());
            // records from failed points may be shorter; pad to the header
            let mut values: Vec<crate::output::Value> = Vec::with_capacity(cols.len());
            for name in cols.iter() {
                let found = record.fields.iter().find(|(c, _)| c == name);
                values.push(match found {
                    Some((_, v)) => v.clone(),
                    None => crate::output::Value::Number(f64::NAN),
                });
            }
            writer.write_row(cols, &values)?;
        }
    }
    Ok(points.len())
}
