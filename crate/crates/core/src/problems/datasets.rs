//! Seeded bin-packing datasets and their JSON form.

use std::fs;
use std::io;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Weibull};

use super::binpack::BinPackInstance;

pub const OR_CAPACITY: u32 = 150;
pub const OR_ITEM_RANGE: (u32, u32) = (20, 100);
pub const WEIBULL_CAPACITY: u32 = 100;
pub const WEIBULL_SCALE: f64 = 45.0;
pub const WEIBULL_SHAPE: f64 = 3.0;

/// Item sizes uniform on the integers 20..=100, capacity 150.
pub fn gen_or_dataset(seed: u64, num_instances: usize, items_per_instance: usize) -> Vec<BinPackInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_instances)
        .map(|_| {
            let items = (0..items_per_instance).map(|_| rng.random_range(OR_ITEM_RANGE.0..=OR_ITEM_RANGE.1)).collect();
            BinPackInstance::new(OR_CAPACITY, items)
        })
        .collect()
}

/// One Weibull(45, 3) item: capped at 100, rounded, at least 1.
pub fn weibull_item(rng: &mut impl Rng) -> u32 {
    let dist = Weibull::new(WEIBULL_SCALE, WEIBULL_SHAPE).expect("valid Weibull parameters");
    let x: f64 = dist.sample(rng);
    x.min(WEIBULL_CAPACITY as f64).round().max(1.0) as u32
}

pub fn gen_weibull_dataset(seed: u64, num_instances: usize, items_per_instance: usize) -> Vec<BinPackInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_instances)
        .map(|_| {
            let items = (0..items_per_instance).map(|_| weibull_item(&mut rng)).collect();
            BinPackInstance::new(WEIBULL_CAPACITY, items)
        })
        .collect()
}

/// Reads a JSON array of `{"capacity": .., "items": [..]}` objects (a single
/// object is accepted too).
pub fn load_instances(path: &Path) -> io::Result<Vec<BinPackInstance>> {
    let text = fs::read_to_string(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    if value.is_array() {
        serde_json::from_value(value).map_err(bad)
    } else {
        Ok(vec![serde_json::from_value(value).map_err(bad)?])
    }
}

pub fn save_instances(path: &Path, instances: &[BinPackInstance]) -> io::Result<()> {
    let text = serde_json::to_string(instances).map_err(io::Error::other)?;
    fs::write(path, text).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn or_parameters() {
        let data = gen_or_dataset(1, 20, 120);
        assert_eq!(data.len(), 20);
        assert!(data.iter().all(|d| d.capacity == 150 && d.items.len() == 120));
        assert!(data.iter().flat_map(|d| &d.items).all(|&i| (20..=100).contains(&i)));
        assert_eq!(data, gen_or_dataset(1, 20, 120));
        assert_ne!(data, gen_or_dataset(2, 20, 120));
    }

    #[test]
    fn weibull_parameters() {
        let data = gen_weibull_dataset(3, 2, 1000);
        assert!(data.iter().all(|d| d.capacity == 100));
        assert!(data.iter().flat_map(|d| &d.items).all(|&i| (1..=100).contains(&i)));
        assert_eq!(data, gen_weibull_dataset(3, 2, 1000));
    }
}
