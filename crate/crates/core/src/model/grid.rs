use super::{ModelError, Result};

/// Square, row-major grid of optional cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    size: usize,
    cells: Vec<Option<T>>,
}

impl<T> Grid<T> {
    pub fn new(size: usize) -> Self {
        let mut cells = Vec::with_capacity(size * size);
        cells.resize_with(size * size, || None);
        Self { size, cells }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&T> {
        if row >= self.size || col >= self.size {
            return None;
        }
        self.cells[row * self.size + col].as_ref()
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> Option<&mut T> {
        if row >= self.size || col >= self.size {
            return None;
        }
        self.cells[row * self.size + col].as_mut()
    }

    /// Stores `value` at `(row, col)` and returns what was there before.
    pub fn set(&mut self, row: usize, col: usize, value: Option<T>) -> Result<Option<T>> {
        let idx = self.index(row, col)?;
        Ok(std::mem::replace(&mut self.cells[idx], value))
    }

    pub fn is_occupied(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_some()
    }

    /// Occupied cells in row-major order.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        let size = self.size;
        self.cells
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.as_ref().map(|v| (i / size, i % size, v)))
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn cells(&self) -> &[Option<T>] {
        &self.cells
    }

    fn index(&self, row: usize, col: usize) -> Result<usize> {
        if row >= self.size || col >= self.size {
            return Err(ModelError::InvalidArgument(format!(
                "cell ({row}, {col}) outside {0}x{0} grid",
                self.size
            )));
        }
        Ok(row * self.size + col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_and_bounds() {
        let mut g: Grid<u32> = Grid::new(3);
        assert_eq!(g.set(1, 2, Some(7)).unwrap(), None);
        assert_eq!(g.get(1, 2), Some(&7));
        assert_eq!(g.get(3, 0), None);
        assert!(g.set(3, 0, Some(1)).is_err());
        let occ: Vec<_> = g.occupied().collect();
        assert_eq!(occ, vec![(1, 2, &7)]);
    }
}
