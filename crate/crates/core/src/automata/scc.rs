/// Strongly connected components (Kosaraju, iterative). Returns the
/// component id of every node and a per-component flag telling whether it
/// contains a cycle (more than one node, or a self-loop).
pub(crate) fn sccs(adj: &[Vec<usize>]) -> (Vec<usize>, Vec<bool>) {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((v, i)) = stack.pop() {
            if i < adj[v].len() {
                stack.push((v, i + 1));
                let w = adj[v][i];
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
            }
        }
    }

    let mut radj = vec![Vec::new(); n];
    for (v, succs) in adj.iter().enumerate() {
        for &w in succs {
            radj[w].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = count;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &radj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }

    let mut size = vec![0usize; count];
    for &c in &comp {
        size[c] += 1;
    }
    let mut cyclic: Vec<bool> = size.iter().map(|&s| s > 1).collect();
    for (v, succs) in adj.iter().enumerate() {
        if succs.contains(&v) {
            cyclic[comp[v]] = true;
        }
    }
    (comp, cyclic)
}
