//! Tables of marks for schemas presenting finite groups.

use std::sync::Arc;

use crate::components::is_connected;
use crate::error::{Error, Result};
use crate::hom::count_homs;
use crate::schema::Schema;
use crate::universe::{enumerate_instances, Bounds, Member};

#[derive(Debug, Clone)]
pub struct MarksTable {
    /// Transitive instances, largest first, ties by canonical form.
    pub transitive: Vec<Member>,
    /// `matrix[i][j]` counts homs from `transitive[j]` into `transitive[i]`.
    pub matrix: Vec<Vec<u64>>,
}

impl MarksTable {
    pub fn is_lower_triangular(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, row)| row.iter().skip(i + 1).all(|&v| v == 0))
    }

    pub fn diagonal_positive(&self) -> bool {
        self.matrix.iter().enumerate().all(|(i, row)| row[i] > 0)
    }
}

/// Computes the marks over the transitive instances within the bounds. Every
/// enumerated instance must act by bijections, otherwise `NotAGroup`.
pub fn table_of_marks(schema: &Arc<Schema>, bounds: &Bounds) -> Result<MarksTable> {
    let universe = enumerate_instances(schema, bounds);
    for m in &universe {
        for (ai, table) in m.instance.actions().iter().enumerate() {
            let mut seen = vec![false; table.len()];
            let bijective = table.len() == m.instance.size(schema.arrows()[ai].target)
                && table.iter().all(|&y| !std::mem::replace(&mut seen[y], true));
            if !bijective {
                return Err(Error::NotAGroup(format!(
                    "arrow `{}` acts non-bijectively on an instance of size {}",
                    schema.arrows()[ai].name,
                    m.instance.total_size()
                )));
            }
        }
    }
    let mut transitive: Vec<Member> = universe.into_iter().filter(|m| is_connected(&m.instance)).collect();
    transitive.sort_by(|a, b| b.instance.total_size().cmp(&a.instance.total_size()).then_with(|| a.form.cmp(&b.form)));
    let matrix = transitive
        .iter()
        .map(|row| transitive.iter().map(|col| count_homs(&col.instance, &row.instance)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(MarksTable { transitive, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::presets;

    #[test]
    fn cyclic_of_order_two() {
        let c2 = Arc::new(presets::c2());
        let t = table_of_marks(&c2, &Bounds(vec![2])).unwrap();
        assert_eq!(t.matrix, vec![vec![2, 0], vec![1, 1]]);
        assert!(t.is_lower_triangular() && t.diagonal_positive());
    }

    #[test]
    fn trivial_group() {
        let s = Arc::new(presets::trivial());
        let t = table_of_marks(&s, &Bounds(vec![3])).unwrap();
        assert_eq!(t.matrix, vec![vec![1]]);
    }

    #[test]
    fn empty_bounds_give_empty_table() {
        let c2 = Arc::new(presets::c2());
        assert!(table_of_marks(&c2, &Bounds(vec![0])).unwrap().matrix.is_empty());
    }

    #[test]
    fn endofunctions_are_not_a_group() {
        let s = Arc::new(presets::endo());
        assert!(matches!(table_of_marks(&s, &Bounds(vec![2])), Err(Error::NotAGroup(_))));
    }
}
