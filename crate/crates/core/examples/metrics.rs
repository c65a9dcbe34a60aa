//! Confusion-matrix metrics under the three aggregation modes.

use plagdet::metrics::{Aggregation, ConfusionMatrix};

fn main() -> plagdet::Result<()> {
    let binary = ConfusionMatrix::from_binary(4, 5, 1, 0);
    let r = binary.precision_recall_f1(Aggregation::Binary)?;
    println!("TP=4 TN=5 FP=1 FN=0");
    println!(
        "  accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4}\n",
        r.accuracy, r.precision, r.recall, r.f1
    );

    let truth = [0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 2];
    let predicted = [0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 0, 1];
    let m = ConfusionMatrix::from_labels(3, &truth, &predicted)?;
    for t in 0..3 {
        let row: Vec<String> = (0..3).map(|p| format!("{:>3}", m.get(t, p))).collect();
        println!("  true {t}: {}", row.join(""));
    }
    for agg in [Aggregation::Weighted, Aggregation::Macro] {
        let r = m.precision_recall_f1(agg)?;
        println!(
            "{agg:?}: accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4}",
            r.accuracy, r.precision, r.recall, r.f1
        );
    }

    let lopsided = ConfusionMatrix::from_counts(3, vec![3, 0, 0, 2, 0, 0, 1, 0, 0])?;
    let r = lopsided.precision_recall_f1(Aggregation::Macro)?;
    println!(
        "\nonly class 0 predicted: zero_division = {}, macro f1 {:.4}",
        r.zero_division, r.f1
    );
    Ok(())
}
