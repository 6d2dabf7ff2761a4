use std::collections::BTreeMap;

use super::{Histogram, NetStatsError};
use crate::ingest::{Category, VenueIx, VenueRegistry};
use crate::snapshot::{ActivityProfile, PlaceGraph};

/// Edge-weight histograms keyed by the destination venue's category. Every
/// category is present, possibly empty.
pub fn category_weight_profile(
    graph: &PlaceGraph,
    registry: &VenueRegistry,
) -> Result<BTreeMap<Category, Histogram>, NetStatsError> {
    let mut out: BTreeMap<Category, Histogram> = Category::ALL.iter().map(|&c| (c, Histogram::default())).collect();
    for (&(_, dest), &w) in graph.edges() {
        let venue = registry.get(dest).ok_or(NetStatsError::UnknownVenue(dest))?;
        out.get_mut(&venue.category).unwrap().add(w);
    }
    Ok(out)
}

/// Mean edge weight per category, `None` for categories with no edges.
pub fn mean_weight(profile: &BTreeMap<Category, Histogram>) -> BTreeMap<Category, Option<f64>> {
    profile.iter().map(|(&c, h)| (c, h.mean())).collect()
}

/// 24×24 matrix whose cell `(o, d)` holds the share of total edge weight
/// running from venues peaking at hour `o` to venues peaking at hour `d`.
pub fn peak_hour_interaction_matrix(
    graph: &PlaceGraph,
    profiles: &BTreeMap<VenueIx, ActivityProfile>,
) -> Result<Vec<Vec<f64>>, NetStatsError> {
    if graph.is_empty() {
        return Err(NetStatsError::EmptyGraph);
    }
    let peak = |v: VenueIx| -> Result<usize, NetStatsError> {
        let p = profiles.get(&v).ok_or(NetStatsError::MissingProfile(v))?;
        if p.slots() != 24 {
            return Err(NetStatsError::WrongResolution(p.slots()));
        }
        Ok(p.peak_slot())
    };
    let mut m = vec![vec![0.0; 24]; 24];
    let mut total = 0.0;
    for (&(o, d), &w) in graph.edges() {
        m[peak(o)?][peak(d)?] += w as f64;
        total += w as f64;
    }
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x /= total;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{read_registry, Venue};
    use crate::snapshot::Window;

    fn profile(v: u32, peak: usize) -> ActivityProfile {
        let mut p = ActivityProfile::zeros(VenueIx(v), 24);
        p.checkins[peak] = 5.0;
        p
    }

    #[test]
    fn single_food_edge() {
        let reg = read_registry("venue_id,lat,lon,category\na,0,0,travel\nb,0,0,food\n".as_bytes()).unwrap();
        let g = PlaceGraph::from_weighted_edges(Window::new(0, 1), [(VenueIx(0), VenueIx(1), 3)]);
        let prof = category_weight_profile(&g, &reg).unwrap();
        assert_eq!(prof[&Category::Food], Histogram::from_values([3]));
        assert!(prof[&Category::Travel].is_empty());
        assert_eq!(mean_weight(&prof)[&Category::Food], Some(3.0));
    }

    #[test]
    fn categories_partition_edges() {
        let reg = VenueRegistry::from_venues(
            (0..4)
                .map(|i| Venue {
                    id: format!("v{i}"),
                    lat: 0.0,
                    lon: 0.0,
                    category: if i % 2 == 0 { Category::Food } else { Category::Shop },
                })
                .collect(),
        )
        .unwrap();
        let g = PlaceGraph::from_pairs(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let prof = category_weight_profile(&g, &reg).unwrap();
        let total: u64 = prof.values().map(Histogram::total).sum();
        assert_eq!(total, g.edge_count() as u64);
    }

    #[test]
    fn unknown_venue_is_error() {
        let reg = read_registry("venue_id,lat,lon,category\na,0,0,travel\n".as_bytes()).unwrap();
        let g = PlaceGraph::from_pairs(&[(0, 5)]);
        assert_eq!(category_weight_profile(&g, &reg), Err(NetStatsError::UnknownVenue(VenueIx(5))));
    }

    #[test]
    fn one_edge_one_cell() {
        let g = PlaceGraph::from_pairs(&[(0, 1)]);
        let profiles = [(VenueIx(0), profile(0, 9)), (VenueIx(1), profile(1, 12))].into_iter().collect();
        let m = peak_hour_interaction_matrix(&g, &profiles).unwrap();
        assert_eq!(m[9][12], 1.0);
        assert_eq!(m.iter().flatten().sum::<f64>(), 1.0);
    }

    #[test]
    fn common_peak_collapses_to_diagonal_cell() {
        let g = PlaceGraph::from_pairs(&[(0, 1), (1, 2), (2, 0), (0, 2)]);
        let profiles = (0..3).map(|v| (VenueIx(v), profile(v, 20))).collect();
        let m = peak_hour_interaction_matrix(&g, &profiles).unwrap();
        assert_eq!(m[20][20], 1.0);
        assert_eq!(m.iter().flatten().filter(|&&x| x > 0.0).count(), 1);
    }

    #[test]
    fn missing_profile_is_error() {
        let g = PlaceGraph::from_pairs(&[(0, 1)]);
        let profiles = [(VenueIx(0), profile(0, 9))].into_iter().collect();
        assert_eq!(
            peak_hour_interaction_matrix(&g, &profiles),
            Err(NetStatsError::MissingProfile(VenueIx(1)))
        );
    }
}
