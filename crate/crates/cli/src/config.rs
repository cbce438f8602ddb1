use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use suprelax::{io, sample_density, DensityExpr, DensityTable, Exec, SlopeCloud};

use crate::Failure;

#[derive(Debug, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    /// Points per axis.
    pub n: usize,
}

/// Density configuration: either an expression sampled on a grid, or a
/// table file whose path is relative to the config file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub expr: Option<String>,
    pub table_path: Option<PathBuf>,
    pub d: Option<usize>,
    pub grid: Option<Grid>,
}

pub fn load_density(path: &Path, exec: Exec) -> Result<DensityTable, Failure> {
    let flag = format!("--density {}", path.display());
    let file = File::open(path).map_err(|e| Failure::at(&flag, e.into()))?;
    let cfg: DensityConfig = io::read_json(file).map_err(|e| Failure::at(&flag, e))?;
    match (&cfg.expr, &cfg.table_path) {
        (Some(text), None) => {
            let (Some(d), Some(grid)) = (cfg.d, &cfg.grid) else {
                return Err(Failure::usage(format!(
                    "{flag}: `expr` needs both `d` and `grid`"
                )));
            };
            let expr =
                DensityExpr::parse(text).map_err(|e| Failure::at(&format!("{flag}: expr"), e))?;
            let cloud = SlopeCloud::uniform(d, grid.n, grid.min, grid.max)
                .map_err(|e| Failure::at(&format!("{flag}: grid"), e))?;
            sample_density(&expr, Arc::new(cloud), exec).map_err(|e| Failure::at(&flag, e))
        }
        (None, Some(rel)) => {
            let table_path = path.parent().unwrap_or(Path::new(".")).join(rel);
            let where_ = format!("{flag}: table_path {}", table_path.display());
            let file = File::open(&table_path).map_err(|e| Failure::at(&where_, e.into()))?;
            let table = io::read_density(file).map_err(|e| Failure::at(&where_, e))?;
            if let Some(d) = cfg.d {
                if d != table.cloud().dim() {
                    return Err(Failure::usage(format!(
                        "{where_}: table has dimension {}, config says d = {d}",
                        table.cloud().dim()
                    )));
                }
            }
            if let Some(g) = &cfg.grid {
                let ok = table
                    .cloud()
                    .grid()
                    .is_some_and(|t| t.n == g.n && t.min == g.min && t.max == g.max);
                if !ok {
                    return Err(Failure::usage(format!(
                        "{where_}: table grid differs from the config grid"
                    )));
                }
            }
            Ok(table)
        }
        _ => Err(Failure::usage(format!(
            "{flag}: give exactly one of `expr` and `table_path`"
        ))),
    }
}
