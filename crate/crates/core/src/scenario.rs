//! JSON scenario files.
//!
//! A scenario declares one or two paths and exactly one interference
//! source: a `topology` with node positions, an explicit `relation`, or a
//! `network` of named nodes and links from which routes are taken or
//! enumerated. An optional `search` block bounds the optimizer. See
//! `docs/scenario-schema.md` for the full schema.

use std::collections::hash_map::RandomState;
use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use petgraph::algo::all_simple_paths;
use petgraph::graphmap::UnGraphMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GeometricTopology, InterferenceRelation, NodeRef, PathPair, Point, PrimaryPath};
use crate::optimizer::{RouteCandidate, SearchSpace, DEFAULT_MAX_ACTIVATIONS};

const DEFAULT_MAX_HOPS: usize = 8;
const MAX_ROUTE_PAIRS: usize = 100_000;

fn schema(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{path}: {msg}"))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBounds {
    pub max_activations: Option<usize>,
    /// Inclusive spacing bounds keyed by path id.
    #[serde(default)]
    pub periods: BTreeMap<u8, [usize; 2]>,
    /// Longest route considered when routes are enumerated.
    pub max_hops: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    id: u8,
    n_senders: Option<usize>,
    source: Option<String>,
    destination: Option<String>,
    routes: Option<Vec<Vec<String>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRelation {
    matrix: Option<Vec<Vec<u8>>>,
    /// Interfering pairs as `[[path, seq], [path, seq]]`.
    pairs: Option<Vec<[[usize; 2]; 2]>>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub nodes: BTreeMap<String, Point>,
    pub links: Vec<[String; 2]>,
    pub interference_radius: f64,
    #[serde(default = "yes")]
    pub half_duplex: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    paths: Vec<RawPath>,
    topology: Option<GeometricTopology>,
    relation: Option<RawRelation>,
    network: Option<Network>,
    #[serde(default)]
    search: SearchBounds,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Environment {
    Topology(GeometricTopology),
    Relation(InterferenceRelation),
    /// Route candidates per path, each a list of node names.
    Network {
        network: Network,
        routes: Vec<Vec<Vec<String>>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    /// Declared paths. In network scenarios the sender count comes from
    /// the first route candidate.
    pub paths: Vec<PrimaryPath>,
    pub environment: Environment,
    pub search: SearchBounds,
}

impl Scenario {
    pub fn load(file: impl AsRef<Path>) -> Result<Self> {
        let file = file.as_ref();
        let text = std::fs::read_to_string(file)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", file.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(if path == "." { "(root)" } else { &path }, e.into_inner())
        })?;
        Self::validate(raw)
    }

    fn validate(raw: RawScenario) -> Result<Self> {
        if raw.paths.is_empty() || raw.paths.len() > 2 {
            return Err(schema("paths", format!("expected 1 or 2 paths, got {}", raw.paths.len())));
        }
        for (k, p) in raw.paths.iter().enumerate() {
            if p.id as usize != k + 1 {
                return Err(schema(&format!("paths[{k}].id"), format!("expected id {}, got {}", k + 1, p.id)));
            }
        }
        let given = [raw.topology.is_some(), raw.relation.is_some(), raw.network.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(schema("(root)", "exactly one of topology, relation, network must be present"));
        }
        for (&id, &[lo, hi]) in &raw.search.periods {
            if !(1..=raw.paths.len() as u8).contains(&id) || lo == 0 || lo > hi {
                return Err(schema(&format!("search.periods.{id}"), "need a declared path id and 1 <= lo <= hi"));
            }
        }
        if raw.search.max_activations == Some(0) {
            return Err(schema("search.max_activations", "must be at least 1"));
        }

        let environment = match (raw.topology, raw.relation, raw.network) {
            (Some(t), _, _) => Environment::Topology(t),
            (_, Some(r), _) => Environment::Relation(relation_of(&raw.paths, r)?),
            (_, _, Some(n)) => {
                let routes = network_routes(&raw.paths, &n, raw.search.max_hops.unwrap_or(DEFAULT_MAX_HOPS))?;
                let paths = routes
                    .iter()
                    .enumerate()
                    .map(|(k, r)| PrimaryPath::new(k as u8 + 1, r[0].len() - 1))
                    .collect::<Result<_>>()?;
                let env = Environment::Network { network: n, routes };
                let sc = Scenario {
                    paths,
                    environment: env,
                    search: raw.search,
                };
                sc.pair().map_err(|e| schema("network", e))?;
                return Ok(sc);
            }
            _ => unreachable!("exactly one source checked above"),
        };
        let paths = raw
            .paths
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let at = |field: &str| format!("paths[{k}].{field}");
                if p.source.is_some() || p.destination.is_some() || p.routes.is_some() {
                    return Err(schema(&at("routes"), "source, destination and routes need a network"));
                }
                let n = p.n_senders.ok_or_else(|| schema(&at("n_senders"), "missing field"))?;
                PrimaryPath::new(p.id, n).map_err(|e| schema(&at("n_senders"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        let sc = Scenario {
            paths,
            environment,
            search: raw.search,
        };
        let field = match sc.environment {
            Environment::Topology(_) => "topology",
            _ => "relation",
        };
        sc.pair().map_err(|e| schema(field, e))?;
        Ok(sc)
    }

    /// The pair this scenario describes. Network scenarios use the first
    /// route candidate of each path.
    pub fn pair(&self) -> Result<PathPair> {
        let p1 = self.paths[0];
        let p2 = self.paths.get(1).copied();
        match &self.environment {
            Environment::Topology(t) => t.build_pair(p1, p2),
            Environment::Relation(r) => PathPair::new(p1, p2, r.clone()),
            Environment::Network { network, routes } => {
                let first: Vec<&Vec<String>> = routes.iter().map(|r| &r[0]).collect();
                network_pair(network, &first)
            }
        }
    }

    /// Every combination of one route per path.
    pub fn route_candidates(&self) -> Result<Vec<RouteCandidate>> {
        let Environment::Network { network, routes } = &self.environment else {
            let pair = self.pair()?;
            return Ok(SearchSpace::fixed(pair, 1).candidates);
        };
        let count: usize = routes.iter().map(Vec::len).product();
        if count > MAX_ROUTE_PAIRS {
            return Err(schema("search.max_hops", format!("{count} route combinations exceed {MAX_ROUTE_PAIRS}")));
        }
        let mut combos: Vec<Vec<&Vec<String>>> = vec![Vec::new()];
        for per_path in routes {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    per_path.iter().map(move |r| {
                        let mut next = prefix.clone();
                        next.push(r);
                        next
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .map(|c| {
                Ok(RouteCandidate {
                    routes: c.iter().map(|r| r.to_vec()).collect(),
                    pair: network_pair(network, &c)?,
                })
            })
            .collect()
    }

    /// Search space from the scenario's bounds, with `max_activations`
    /// overriding the file when given.
    pub fn search_space(&self, max_activations: Option<usize>) -> Result<SearchSpace> {
        let bound = |id: u8| self.search.periods.get(&id).map(|&[lo, hi]| (lo, hi));
        Ok(SearchSpace {
            candidates: self.route_candidates()?,
            period_bounds: [bound(1), bound(2)],
            max_activations: max_activations
                .or(self.search.max_activations)
                .unwrap_or(DEFAULT_MAX_ACTIVATIONS),
        })
    }
}

fn relation_of(paths: &[RawPath], raw: RawRelation) -> Result<InterferenceRelation> {
    let counts: Vec<usize> = paths
        .iter()
        .enumerate()
        .map(|(k, p)| p.n_senders.ok_or_else(|| schema(&format!("paths[{k}].n_senders"), "missing field")))
        .collect::<Result<_>>()?;
    let total: usize = counts.iter().sum();
    match (raw.matrix, raw.pairs) {
        (Some(m), None) => {
            if m.len() != total {
                return Err(schema(
                    "relation.matrix",
                    format!("expected {total} rows for the declared senders, got {}", m.len()),
                ));
            }
            InterferenceRelation::from_matrix(&m).map_err(|e| schema("relation.matrix", e))
        }
        (None, Some(pairs)) => {
            let mut index = Vec::with_capacity(pairs.len());
            for (k, [a, b]) in pairs.iter().enumerate() {
                let mut idx = [0; 2];
                for (slot, &[path, seq]) in [a, b].into_iter().enumerate() {
                    if !(1..=counts.len()).contains(&path) || seq == 0 || seq > counts[path - 1] {
                        return Err(schema(
                            &format!("relation.pairs[{k}][{slot}]"),
                            format!("no sender {}", NodeRef::new(path.min(255) as u8, seq)),
                        ));
                    }
                    idx[slot] = counts[..path - 1].iter().sum::<usize>() + seq - 1;
                }
                if idx[0] == idx[1] {
                    return Err(schema(&format!("relation.pairs[{k}]"), "a sender cannot interfere with itself"));
                }
                index.push(idx);
            }
            InterferenceRelation::from_fn(total, |i, j| index.iter().any(|&[a, b]| (a, b) == (i, j) || (b, a) == (i, j)))
                .map_err(|e| schema("relation", e))
        }
        _ => Err(schema("relation", "give exactly one of matrix, pairs")),
    }
}

fn network_routes(paths: &[RawPath], net: &Network, max_hops: usize) -> Result<Vec<Vec<Vec<String>>>> {
    let names: Vec<&String> = net.nodes.keys().collect();
    let id_of = |name: &str| names.iter().position(|n| n.as_str() == name);
    let mut graph = UnGraphMap::<usize, (), RandomState>::default();
    for (k, [a, b]) in net.links.iter().enumerate() {
        let at = format!("network.links[{k}]");
        let (Some(x), Some(y)) = (id_of(a), id_of(b)) else {
            return Err(schema(&at, format!("unknown node in link {a}-{b}")));
        };
        if x == y {
            return Err(schema(&at, "a link needs two distinct nodes"));
        }
        graph.add_edge(x, y, ());
    }
    let mut out = Vec::with_capacity(paths.len());
    for (k, p) in paths.iter().enumerate() {
        let at = |field: &str| format!("paths[{k}].{field}");
        if p.n_senders.is_some() {
            return Err(schema(&at("n_senders"), "sender counts come from routes in a network scenario"));
        }
        let routes = match &p.routes {
            Some(rs) => {
                if rs.is_empty() {
                    return Err(schema(&at("routes"), "need at least one route"));
                }
                for (r, route) in rs.iter().enumerate() {
                    check_route(&graph, &id_of, route, p, &format!("paths[{k}].routes[{r}]"))?;
                }
                rs.clone()
            }
            None => {
                let (Some(src), Some(dst)) = (&p.source, &p.destination) else {
                    return Err(schema(&at("routes"), "give routes, or source and destination"));
                };
                let s = id_of(src).ok_or_else(|| schema(&at("source"), format!("unknown node {src}")))?;
                let d = id_of(dst).ok_or_else(|| schema(&at("destination"), format!("unknown node {dst}")))?;
                if s == d || !graph.contains_node(s) || !graph.contains_node(d) {
                    return Err(schema(&at("destination"), "no route between source and destination"));
                }
                let mut found: Vec<Vec<usize>> =
                    all_simple_paths::<Vec<usize>, _, RandomState>(&graph, s, d, 0, Some(max_hops.saturating_sub(1)))
                        .collect();
                found.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
                if found.is_empty() {
                    return Err(schema(&at("destination"), format!("no route within {max_hops} hops")));
                }
                found
                    .into_iter()
                    .map(|r| r.into_iter().map(|i| names[i].clone()).collect())
                    .collect()
            }
        };
        out.push(routes);
    }
    Ok(out)
}

fn check_route(
    graph: &UnGraphMap<usize, (), RandomState>,
    id_of: &impl Fn(&str) -> Option<usize>,
    route: &[String],
    decl: &RawPath,
    at: &str,
) -> Result<()> {
    if route.len() < 2 {
        return Err(schema(at, "a route needs a source and a destination"));
    }
    let mut seen = HashSet::new();
    let ids: Vec<usize> = route
        .iter()
        .map(|n| {
            let id = id_of(n).ok_or_else(|| schema(at, format!("unknown node {n}")))?;
            if !seen.insert(id) {
                return Err(schema(at, format!("node {n} repeats")));
            }
            Ok(id)
        })
        .collect::<Result<_>>()?;
    for (k, w) in ids.windows(2).enumerate() {
        if !graph.contains_edge(w[0], w[1]) {
            return Err(schema(at, format!("no link {}-{}", route[k], route[k + 1])));
        }
    }
    if decl.source.as_ref().is_some_and(|s| s != &route[0]) {
        return Err(schema(at, "route does not start at the declared source"));
    }
    if decl.destination.as_ref().is_some_and(|d| d != route.last().unwrap()) {
        return Err(schema(at, "route does not end at the declared destination"));
    }
    Ok(())
}

fn network_pair(net: &Network, routes: &[&Vec<String>]) -> Result<PathPair> {
    let positions = routes
        .iter()
        .enumerate()
        .map(|(k, r)| (k as u8 + 1, r.iter().map(|n| net.nodes[n]).collect()))
        .collect();
    let topo = GeometricTopology {
        positions,
        interference_radius: net.interference_radius,
        half_duplex: net.half_duplex,
    };
    let p1 = PrimaryPath::new(1, routes[0].len() - 1)?;
    let p2 = routes.get(1).map(|r| PrimaryPath::new(2, r.len() - 1)).transpose()?;
    topo.build_pair(p1, p2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::intensity_report;

    const CHAIN: &str = r#"{
        "paths": [{"id": 1, "n_senders": 6}],
        "topology": {"positions": {"1": [[0],[1],[2],[3],[4],[5],[6]]}, "interference_radius": 1.5}
    }"#;

    #[test]
    fn chain_topology() {
        let sc = Scenario::from_json(CHAIN).unwrap();
        let pair = sc.pair().unwrap();
        let rep = intensity_report(&pair, &pair.all_nodes()).unwrap();
        assert_eq!((rep.interference_intensity, rep.concurrency_intensity), (3, 2));
    }

    #[test]
    fn relation_forms_agree() {
        let matrix = r#"{"paths": [{"id": 1, "n_senders": 2}, {"id": 2, "n_senders": 1}],
            "relation": {"matrix": [[0,1,0],[1,0,1],[0,1,0]]}}"#;
        let pairs = r#"{"paths": [{"id": 1, "n_senders": 2}, {"id": 2, "n_senders": 1}],
            "relation": {"pairs": [[[1,1],[1,2]], [[2,1],[1,2]]]}}"#;
        let a = Scenario::from_json(matrix).unwrap().pair().unwrap();
        let b = Scenario::from_json(pairs).unwrap().pair().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_name_the_json_path() {
        let cases = [
            (r#"{"paths": [{"id": 1, "n_senders": "six"}], "relation": {"matrix": [[0]]}}"#, "paths[0].n_senders"),
            (r#"{"paths": [{"id": 1, "n_senders": 1}]}"#, "(root)"),
            (
                r#"{"paths": [{"id": 1, "n_senders": 1}], "relation": {"matrix": [[0]]}, "topology": {"positions": {}, "interference_radius": 1}}"#,
                "(root)",
            ),
            (r#"{"paths": [{"id": 1, "n_senders": 3}], "relation": {"matrix": [[0]]}}"#, "relation.matrix"),
            (r#"{"paths": [{"id": 2, "n_senders": 1}], "relation": {"matrix": [[0]]}}"#, "paths[0].id"),
            (r#"{"paths": [{"id": 1, "n_senders": 2}], "relation": {"pairs": [[[1,1],[1,3]]]}}"#, "relation.pairs[0][1]"),
            (r#"{"paths": [{"id": 1, "n_senders": 1, "color": 3}], "relation": {"matrix": [[0]]}}"#, "paths[0]"),
        ];
        for (text, path) in cases {
            let err = Scenario::from_json(text).unwrap_err().to_string();
            assert!(err.contains(path), "{err} should mention {path}");
        }
    }

    #[test]
    fn network_routes_are_enumerated() {
        let text = r#"{
            "paths": [{"id": 1, "source": "a", "destination": "d"},
                      {"id": 2, "routes": [["x", "y"]]}],
            "network": {
                "nodes": {"a": [0,0], "b": [1,0], "c": [1,1], "d": [2,0], "x": [0,10], "y": [1,10]},
                "links": [["a","b"], ["b","d"], ["a","c"], ["c","d"], ["x","y"]],
                "interference_radius": 1.2
            },
            "search": {"max_hops": 2}
        }"#;
        let sc = Scenario::from_json(text).unwrap();
        let cands = sc.route_candidates().unwrap();
        assert_eq!(cands.len(), 2);
        assert_eq!(cands[0].routes[0], ["a", "b", "d"]);
        assert_eq!(cands[1].routes[0], ["a", "c", "d"]);
        assert_eq!(sc.paths[0].n_senders, 2);
        let bad = text.replace(r#"[["x", "y"]]"#, r#"[["x", "a"]]"#);
        assert!(Scenario::from_json(&bad).unwrap_err().to_string().contains("paths[1].routes[0]"));
    }
}
