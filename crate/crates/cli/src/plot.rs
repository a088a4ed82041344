//! Generated matplotlib script for a sweep CSV.

/// Script that reads `csv_name` (relative to the script's directory) and
/// draws R, T and R+T against E, left and right incidence overlaid.
pub fn plot_script(csv_name: &str, title: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
# Usage: python3 {script} [--save out.png]
import csv
import os
import sys

import matplotlib
if "--save" in sys.argv:
    matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
cols = {{}}
with open(os.path.join(here, {csv:?}), newline="") as fh:
    for row in csv.DictReader(fh):
        if row["R_left"] == "":
            continue
        for key, value in row.items():
            cols.setdefault(key, []).append(value)

def num(key):
    return [float(v) for v in cols.get(key, [])]

E = num("E")
fig, axes = plt.subplots(1, 3, figsize=(13, 4), sharex=True)
panels = [("R", "R_left", "R_right"), ("T", "T_left", "T_right"), ("R + T", "sum_left", "sum_right")]
for ax, (label, left, right) in zip(axes, panels):
    ax.plot(E, num(left), "-", label="left incidence")
    ax.plot(E, num(right), "--", label="right incidence")
    ax.set_xlabel("E")
    ax.set_ylabel(label)
    ax.legend()
fig.suptitle({title:?})
fig.tight_layout()

if "--save" in sys.argv:
    fig.savefig(sys.argv[sys.argv.index("--save") + 1], dpi=150)
else:
    plt.show()
"#,
        script = csv_name.trim_end_matches(".csv").to_string() + "_plot.py",
        csv = csv_name,
        title = title,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_references_csv_and_columns() {
        let s = plot_script("figure4.csv", "figure 4");
        assert!(s.contains("\"figure4.csv\""));
        for col in [
            "R_left",
            "R_right",
            "T_left",
            "T_right",
            "sum_left",
            "sum_right",
        ] {
            assert!(s.contains(col));
        }
        assert!(s.contains("plt.subplots(1, 3"));
    }
}
