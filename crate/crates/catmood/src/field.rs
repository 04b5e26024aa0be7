//! Cell-centered solution storage with ghost layers.

/// Per-cell vectors of `M` conserved variables at one time level,
/// stored contiguously with `n_ghost` ghost cells on each side.
///
/// Cell indices are signed: interior cells are `0 .. n_cells`, ghosts
/// extend to `-n_ghost` on the left and `n_cells + n_ghost - 1` on the
/// right.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField<const M: usize> {
    data: Vec<[f64; M]>,
    n_cells: usize,
    n_ghost: usize,
}

impl<const M: usize> StateField<M> {
    pub fn new(n_cells: usize, n_ghost: usize) -> Self {
        assert!(n_cells > 0, "field needs at least one interior cell");
        StateField {
            data: vec![[0.0; M]; n_cells + 2 * n_ghost],
            n_cells,
            n_ghost,
        }
    }

    /// Initialize interior cells from a function of the cell index.
    pub fn from_fn(
        n_cells: usize,
        n_ghost: usize,
        mut init: impl FnMut(usize) -> [f64; M],
    ) -> Self {
        let mut field = Self::new(n_cells, n_ghost);
        for i in 0..n_cells {
            *field.cell_mut(i as isize) = init(i);
        }
        field
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_ghost(&self) -> usize {
        self.n_ghost
    }

    fn offset(&self, cell: isize) -> usize {
        let idx = cell + self.n_ghost as isize;
        debug_assert!(
            idx >= 0 && (idx as usize) < self.data.len(),
            "cell index {cell} outside ghost layout"
        );
        idx as usize
    }

    pub fn cell(&self, cell: isize) -> &[f64; M] {
        &self.data[self.offset(cell)]
    }

    pub fn cell_mut(&mut self, cell: isize) -> &mut [f64; M] {
        let idx = self.offset(cell);
        &mut self.data[idx]
    }

    /// Interior cells as a slice, in order.
    pub fn interior(&self) -> &[[f64; M]] {
        &self.data[self.n_ghost..self.n_ghost + self.n_cells]
    }

    /// Contiguous window of `len` cells starting at signed cell index
    /// `first` (may reach into the ghost layers).
    pub fn window(&self, first: isize, len: usize) -> &[[f64; M]] {
        let start = self.offset(first);
        &self.data[start..start + len]
    }

    /// Component sums over interior cells.
    pub fn component_sums(&self) -> [f64; M] {
        let mut sums = [0.0; M];
        for u in self.interior() {
            for c in 0..M {
                sums[c] += u[c];
            }
        }
        sums
    }

    /// True when every interior component is finite.
    pub fn all_finite(&self) -> bool {
        self.interior()
            .iter()
            .all(|u| u.iter().all(|v| v.is_finite()))
    }
}
