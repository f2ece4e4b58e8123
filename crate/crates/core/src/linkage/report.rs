use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::{encode_png, ChannelLayout, ImageBuffer};

pub const UNKNOWN_SOURCE: &str = "Unknown";
const CELL_PX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Attribution,
    IntraLayer,
    InterLayer,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Attribution => "attribution",
            Task::IntraLayer => "intra",
            Task::InterLayer => "inter",
        }
    }
}

/// Where the test images of one true source ended up, for one channel (or
/// channel pair).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub channel: String,
    pub source: String,
    /// One count per candidate, then the `Unknown` count.
    pub counts: Vec<usize>,
    pub test_count: usize,
    pub accuracy: f64,
    /// `None` when nothing was attributed to `source`.
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub task: Task,
    pub candidates: Vec<String>,
    pub test_count: usize,
    pub rows: Vec<ReportRow>,
    /// Rows whose accuracy suggests there is no usable sensor signal.
    pub flags: Vec<String>,
}

/// Attributed candidate index per test image (`None` for unknown), grouped
/// by true candidate.
pub(crate) struct ChannelOutcome {
    pub channel: String,
    pub truth: Vec<usize>,
    pub answers: Vec<Option<usize>>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl EvaluationReport {
    pub(crate) fn assemble(
        task: Task,
        candidates: Vec<String>,
        test_count: usize,
        outcomes: &[ChannelOutcome],
    ) -> Self {
        let k = candidates.len();
        let mut rows = Vec::new();
        let mut flags = Vec::new();
        for o in outcomes {
            // confusion[true][answer], answer k = unknown
            let mut confusion = vec![vec![0usize; k + 1]; k];
            for (&t, a) in o.truth.iter().zip(&o.answers) {
                confusion[t][a.unwrap_or(k)] += 1;
            }
            let totals: Vec<usize> = confusion.iter().map(|r| r.iter().sum()).collect();
            for (d, counts) in confusion.iter().enumerate() {
                if totals[d] == 0 {
                    continue;
                }
                let tp = counts[d];
                let fp: usize = (0..k).filter(|&o| o != d).map(|o| confusion[o][d]).sum();
                let negatives: usize = (0..k).filter(|&o| o != d).map(|o| totals[o]).sum();
                let tn = negatives - fp;
                let fn_ = totals[d] - tp;
                let accuracy = tp as f64 / totals[d] as f64;
                if accuracy < 0.5 {
                    flags.push(format!(
                        "{} / {}: accuracy {:.2}, no usable sensor signal",
                        o.channel, candidates[d], accuracy
                    ));
                }
                rows.push(ReportRow {
                    channel: o.channel.clone(),
                    source: candidates[d].clone(),
                    counts: counts.clone(),
                    test_count: totals[d],
                    accuracy,
                    ppv: ratio(tp, tp + fp),
                    npv: ratio(tn, tn + fn_),
                });
            }
        }
        EvaluationReport {
            task,
            candidates,
            test_count,
            rows,
            flags,
        }
    }

    pub fn row(&self, channel: &str, source: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.channel == channel && r.source == source)
    }

    /// Rows of one channel, in candidate order.
    pub fn channel_rows<'a>(
        &'a self,
        channel: &'a str,
    ) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows.iter().filter(move |r| r.channel == channel)
    }

    /// Distinct channel labels in report order.
    pub fn channels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if out.last() != Some(&r.channel) {
                out.push(r.channel.clone());
            }
        }
        out
    }

    /// Correct attributions over all test images.
    pub fn accuracy(&self) -> f64 {
        let correct: usize = self
            .rows
            .iter()
            .map(|r| {
                self.candidates
                    .iter()
                    .position(|c| *c == r.source)
                    .map_or(0, |i| r.counts[i])
            })
            .sum();
        let total: usize = self.rows.iter().map(|r| r.test_count).sum();
        if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        }
    }

    /// Count grid: `channel,source,<candidates>,Unknown`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel,source");
        for c in &self.candidates {
            let _ = write!(out, ",{c}");
        }
        let _ = writeln!(out, ",{UNKNOWN_SOURCE}");
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.channel, r.source);
            for n in &r.counts {
                let _ = write!(out, ",{n}");
            }
            out.push('\n');
        }
        out
    }

    /// Per-row metrics: `channel,source,test_count,accuracy,ppv,npv`; empty
    /// fields where a metric is undefined.
    pub fn metrics_csv(&self) -> String {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        let mut out = String::from("channel,source,test_count,accuracy,ppv,npv\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{},{}",
                r.channel,
                r.source,
                r.test_count,
                r.accuracy,
                fmt(r.ppv),
                fmt(r.npv)
            );
        }
        out
    }

    /// The count grid as a PNG, one square per cell, from white (0) to
    /// saturated blue (`test_count`).
    pub fn heatmap(&self) -> Result<ImageBuffer> {
        let cols = self.candidates.len() + 1;
        let (w, h) = (cols * CELL_PX, self.rows.len().max(1) * CELL_PX);
        let mut px = vec![255u8; w * h * 3];
        let full = self.test_count.max(1) as f64;
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &n) in row.counts.iter().enumerate() {
                let t = (n as f64 / full).min(1.0);
                let level = (255.0 * (1.0 - t)).round() as u8;
                for y in r * CELL_PX..(r + 1) * CELL_PX {
                    for x in c * CELL_PX..(c + 1) * CELL_PX {
                        let i = (y * w + x) * 3;
                        px[i..i + 3].copy_from_slice(&[level, level, 255]);
                    }
                }
            }
        }
        ImageBuffer::new(w, h, ChannelLayout::Rgb8, px)
    }

    pub fn heatmap_png(&self) -> Result<Vec<u8>> {
        encode_png(&self.heatmap()?)
    }
}
