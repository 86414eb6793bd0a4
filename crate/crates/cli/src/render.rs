//! Text views of decompositions. Pure formatting, no check logic.

use nonlocal_cubes::{Decomposition, Factor, Family, Subcube};

fn factor_set(f: &Factor) -> String {
    if f.lo == f.hi {
        format!("{{{}}}", f.lo)
    } else if f.hi == f.lo + 1 {
        format!("{{{},{}}}", f.lo, f.hi)
    } else {
        format!("{{{}..{}}}", f.lo, f.hi)
    }
}

fn block_cell(sc: &Subcube) -> String {
    sc.factors
        .iter()
        .map(factor_set)
        .collect::<Vec<_>>()
        .join("x")
}

fn kset_cell(kset: &[u8]) -> String {
    if kset.is_empty() {
        "{}".to_string()
    } else {
        let parts: Vec<String> = kset.iter().map(|p| format!("A{p}")).collect();
        format!("{{{}}}", parts.join(","))
    }
}

/// One table per layer: rows are the even party subsets, columns the two
/// families; the central block is listed first.
pub fn table(dec: &Decomposition) -> String {
    let mut out = String::new();
    let dims: Vec<String> = dec.dims().dims().iter().map(u32::to_string).collect();
    out.push_str(&format!("grid Z_{}\n", dims.join(" x Z_")));
    if let Some(central) = dec.central() {
        out.push_str(&format!("central block B0: {}\n", block_cell(central)));
    }
    for k in 1..=dec.dims().layer_count() {
        out.push_str(&format!("\nlayer {k}\n"));
        let rows: Vec<(&Subcube, &Subcube)> = {
            let layer: Vec<&Subcube> = dec.blocks().iter().filter(|b| b.layer == k).collect();
            layer.chunks(2).map(|pair| (pair[0], pair[1])).collect()
        };
        let kw = rows
            .iter()
            .map(|(c, _)| kset_cell(&c.kset).len())
            .max()
            .unwrap_or(1);
        let cw = rows
            .iter()
            .map(|(c, _)| block_cell(c).len())
            .max()
            .unwrap_or(1);
        out.push_str(&format!(
            "{:kw$} | {:cw$} | {}\n",
            "K",
            "C_K",
            "D_K",
            kw = kw,
            cw = cw
        ));
        for (c, d) in rows {
            debug_assert_eq!(c.family, Some(Family::C));
            debug_assert_eq!(d.family, Some(Family::D));
            out.push_str(&format!(
                "{:kw$} | {:cw$} | {}\n",
                kset_cell(&c.kset),
                block_cell(c),
                block_cell(d),
                kw = kw,
                cw = cw
            ));
        }
    }
    out
}

/// For three parties: one grid per third-party index, each cell showing the
/// label of its containing block.
pub fn slices(dec: &Decomposition) -> String {
    assert_eq!(dec.dims().n_parties(), 3);
    let d = dec.dims().dims().to_vec();
    let label = |p: &[u32]| -> String {
        dec.blocks()
            .iter()
            .find(|b| b.contains(p))
            .map(|b| b.short_label())
            .unwrap_or_else(|| "?".to_string())
    };
    let width = dec
        .blocks()
        .iter()
        .map(|b| b.short_label().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for a3 in 0..d[2] {
        out.push_str(&format!("slice A3={a3} (rows A1, columns A2)\n"));
        for a1 in 0..d[0] {
            let row: Vec<String> = (0..d[1])
                .map(|a2| format!("{:width$}", label(&[a1, a2, a3]), width = width))
                .collect();
            out.push_str(&format!("  {}\n", row.join(" ")));
        }
        out.push('\n');
    }
    out
}
