//! Dense linear algebra over the two-element field.

/// Dense bit matrix, one `u64`-packed bit vector per row.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    cols: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            cols,
            words,
            rows: vec![vec![0; words]; rows],
        }
    }

    pub fn set(&mut self, row: usize, col: usize) {
        assert!(col < self.cols);
        self.rows[row][col / 64] |= 1 << (col % 64);
    }

    pub fn flip(&mut self, row: usize, col: usize) {
        assert!(col < self.cols);
        self.rows[row][col / 64] ^= 1 << (col % 64);
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col / 64] >> (col % 64) & 1 == 1
    }

    /// Rank by Gauss-Jordan elimination on a copy of the matrix.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] & bit != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[word] & bit != 0 {
                    for w in word..self.words {
                        row[w] ^= pivot_row[w];
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}
