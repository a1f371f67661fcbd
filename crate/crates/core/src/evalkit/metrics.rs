use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::activity::ActivityLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fneg: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fneg
    }

    /// The same counts with the negative class treated as positive.
    pub fn swapped(&self) -> Confusion {
        Confusion {
            tp: self.tn,
            fp: self.fneg,
            tn: self.tp,
            fneg: self.fp,
        }
    }
}

pub fn confusion(
    pred: &[BTreeSet<ActivityLabel>],
    gold: &[BTreeSet<ActivityLabel>],
    activity: ActivityLabel,
) -> Result<Confusion, EvalError> {
    if pred.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            gold: gold.len(),
        });
    }
    let mut c = Confusion::default();
    for (p, g) in pred.iter().zip(gold) {
        match (p.contains(&activity), g.contains(&activity)) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fneg += 1,
        }
    }
    Ok(c)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ActivityMetrics {
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub pos_precision: f64,
    pub pos_recall: f64,
    pub pos_f1: f64,
}

impl ActivityMetrics {
    pub fn from_confusion(c: &Confusion) -> Self {
        let pos_precision = ratio(c.tp, c.tp + c.fp);
        let pos_recall = ratio(c.tp, c.tp + c.fneg);
        let neg_precision = ratio(c.tn, c.tn + c.fneg);
        let neg_recall = ratio(c.tn, c.tn + c.fp);
        let pos_f1 = f1(pos_precision, pos_recall);
        let neg_f1 = f1(neg_precision, neg_recall);
        ActivityMetrics {
            accuracy: ratio(c.tp + c.tn, c.total()),
            macro_precision: (pos_precision + neg_precision) / 2.0,
            macro_recall: (pos_recall + neg_recall) / 2.0,
            macro_f1: (pos_f1 + neg_f1) / 2.0,
            pos_precision,
            pos_recall,
            pos_f1,
        }
    }

    fn columns(&self) -> [f64; 7] {
        [
            self.accuracy,
            self.macro_precision,
            self.macro_recall,
            self.macro_f1,
            self.pos_precision,
            self.pos_recall,
            self.pos_f1,
        ]
    }

    fn mean(rows: &[ActivityMetrics]) -> Self {
        let n = rows.len().max(1) as f64;
        let mut sum = [0.0; 7];
        for r in rows {
            for (s, v) in sum.iter_mut().zip(r.columns()) {
                *s += v;
            }
        }
        let m = sum.map(|s| s / n);
        ActivityMetrics {
            accuracy: m[0],
            macro_precision: m[1],
            macro_recall: m[2],
            macro_f1: m[3],
            pos_precision: m[4],
            pos_recall: m[5],
            pos_f1: m[6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityRow {
    pub confusion: Confusion,
    #[serde(flatten)]
    pub metrics: ActivityMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub per_activity: BTreeMap<ActivityLabel, ActivityRow>,
    /// Unweighted mean over the activities.
    pub overall: ActivityMetrics,
}

pub fn metrics(conf: &BTreeMap<ActivityLabel, Confusion>) -> MetricsReport {
    let per_activity: BTreeMap<_, _> = conf
        .iter()
        .map(|(a, c)| {
            (
                *a,
                ActivityRow {
                    confusion: *c,
                    metrics: ActivityMetrics::from_confusion(c),
                },
            )
        })
        .collect();
    let rows: Vec<ActivityMetrics> = per_activity.values().map(|r| r.metrics).collect();
    MetricsReport {
        overall: ActivityMetrics::mean(&rows),
        per_activity,
    }
}

/// Confusion counts for all eight activities, then [`metrics`].
pub fn evaluate(
    pred: &[BTreeSet<ActivityLabel>],
    gold: &[BTreeSet<ActivityLabel>],
) -> Result<MetricsReport, EvalError> {
    let conf = ActivityLabel::ALL
        .into_iter()
        .map(|a| confusion(pred, gold, a).map(|c| (a, c)))
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(metrics(&conf))
}

impl MetricsReport {
    pub fn render_table(&self) -> String {
        let header = [
            "accuracy", "macro_p", "macro_r", "macro_f1", "pos_p", "pos_r", "pos_f1",
        ];
        let mut out = format!("{:<18}", "activity");
        for h in header {
            out.push_str(&format!(" {h:>9}"));
        }
        out.push('\n');
        let mut row = |name: &str, m: &ActivityMetrics| {
            out.push_str(&format!("{name:<18}"));
            for v in m.columns() {
                out.push_str(&format!(" {v:>9.4}"));
            }
            out.push('\n');
        };
        for (a, r) in &self.per_activity {
            row(a.as_str(), &r.metrics);
        }
        row("average", &self.overall);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: ActivityLabel = ActivityLabel::ValidateData;

    fn sets(bits: &[bool]) -> Vec<BTreeSet<ActivityLabel>> {
        bits.iter()
            .map(|&b| if b { BTreeSet::from([A]) } else { BTreeSet::new() })
            .collect()
    }

    #[test]
    fn perfect_and_degenerate_counts() {
        let gold = sets(&[true, true, true, false, false, false, false, false, false, false]);
        assert_eq!(
            confusion(&gold, &gold, A).unwrap(),
            Confusion {
                tp: 3,
                fp: 0,
                tn: 7,
                fneg: 0
            }
        );
        let none = sets(&[false; 10]);
        assert_eq!(
            confusion(&none, &gold, A).unwrap(),
            Confusion {
                tp: 0,
                fp: 0,
                tn: 7,
                fneg: 3
            }
        );
        assert!(matches!(
            confusion(&none[..3], &gold, A),
            Err(EvalError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn perfect_is_all_ones() {
        let m = ActivityMetrics::from_confusion(&Confusion {
            tp: 3,
            fp: 0,
            tn: 7,
            fneg: 0,
        });
        assert!(m.columns().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn worked_example() {
        let m = ActivityMetrics::from_confusion(&Confusion {
            tp: 8,
            fp: 2,
            tn: 85,
            fneg: 5,
        });
        assert!((m.pos_precision - 0.8).abs() < 1e-12);
        assert!((m.pos_recall - 8.0 / 13.0).abs() < 1e-12);
        assert!((m.pos_f1 - 0.6957).abs() < 1e-4);
        assert!((m.macro_precision - 0.8722).abs() < 1e-4);
        assert!((m.macro_recall - (8.0 / 13.0 + 85.0 / 87.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn all_negative_predictor() {
        let c = Confusion {
            tp: 0,
            fp: 0,
            tn: 7,
            fneg: 3,
        };
        let m = ActivityMetrics::from_confusion(&c);
        assert_eq!(m.pos_precision, 0.0);
        assert_eq!(m.macro_precision, 0.7 / 2.0);
    }

    #[test]
    fn class_swap_keeps_macro() {
        let c = Confusion {
            tp: 8,
            fp: 2,
            tn: 85,
            fneg: 5,
        };
        let a = ActivityMetrics::from_confusion(&c);
        let b = ActivityMetrics::from_confusion(&c.swapped());
        assert_eq!(a.macro_precision, b.macro_precision);
        assert_eq!(a.macro_recall, b.macro_recall);
        assert_eq!(a.macro_f1, b.macro_f1);
        assert_eq!(a.accuracy, b.accuracy);
    }

    #[test]
    fn overall_is_unweighted_mean() {
        let conf = BTreeMap::from([
            (
                ActivityLabel::SetupNotebook,
                Confusion {
                    tp: 3,
                    fp: 0,
                    tn: 7,
                    fneg: 0,
                },
            ),
            (
                ActivityLabel::TrainModel,
                Confusion {
                    tp: 0,
                    fp: 0,
                    tn: 7,
                    fneg: 3,
                },
            ),
        ]);
        let r = metrics(&conf);
        assert_eq!(r.overall.accuracy, (1.0 + 0.7) / 2.0);
        assert!(r.render_table().contains("average"));
        assert_eq!(r.to_json()["per_activity"]["train_model"]["confusion"]["fn"], 3);
    }
}
