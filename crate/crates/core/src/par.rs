//! Scoped-thread data parallel map.

use crate::Result;

/// Maps `f` over `items` on all available cores, preserving order. Falls back
/// to a serial loop below `min_len` items.
pub fn map<T: Sync, R: Send, F>(items: &[T], min_len: usize, f: F) -> Result<Vec<R>>
where
    F: Fn(&T) -> Result<R> + Sync,
{
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    if workers <= 1 || items.len() < min_len.max(2) {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    let parts: Vec<Result<Vec<R>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| scope.spawn(move || c.iter().map(f).collect::<Result<Vec<R>>>()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(items.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
