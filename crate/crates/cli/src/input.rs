use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::Args;
use distgap::graph::{parse_edge_list, parse_graph6, Graph};
use distgap::metric::{parse_metric_csv, FiniteMetricSpace};
use distgap::{Error, Result};

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Edge list file ("-" for stdin): one "u v" pair per line, optional "n <count>" header
    #[arg(long, value_name = "PATH")]
    pub edges: Option<String>,
    /// graph6 string, or a path to a file holding one
    #[arg(long, value_name = "G6")]
    pub graph6: Option<String>,
    /// Distance matrix as CSV, one row per line
    #[arg(long, value_name = "CSV")]
    pub metric: Option<PathBuf>,
}

pub enum Input {
    Graph(Graph),
    Metric(FiniteMetricSpace<f64>),
}

fn read_source(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

impl InputArgs {
    pub fn load(&self) -> Result<Input> {
        if let Some(p) = &self.edges {
            return Ok(Input::Graph(parse_edge_list(&read_source(p)?)?));
        }
        if let Some(g6) = &self.graph6 {
            let text = if std::path::Path::new(g6).is_file() { fs::read_to_string(g6)? } else { g6.clone() };
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
            return Ok(Input::Graph(parse_graph6(first.trim().as_bytes())?));
        }
        if let Some(p) = &self.metric {
            return Ok(Input::Metric(parse_metric_csv(&fs::read_to_string(p)?)?));
        }
        Err(Error::InvalidArgument("no input given".into()))
    }

    pub fn load_graph(&self) -> Result<Graph> {
        match self.load()? {
            Input::Graph(g) => Ok(g),
            Input::Metric(_) => Err(Error::InvalidArgument("this command needs a graph (--edges or --graph6)".into())),
        }
    }
}

/// Parses `a..b` (inclusive), `a..=b` or a single value.
pub fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad integer `{t}` in range `{s}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}
