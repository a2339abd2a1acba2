//! Free-parameter counts of IMP-constrained and unconstrained FSM sources.

use crate::imp::partition::{OrderVector, Partition};

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).pow(exp as u32)
}

/// `kappa_I = sum_i alpha_i^k_i (alpha_i - 1) + (m - 1) m^k_sw`.
pub fn count_imp_params(partition: &Partition, orders: &OrderVector) -> u128 {
    imp_params_from_sizes(&partition.block_sizes(), orders)
}

pub fn imp_params_from_sizes(sizes: &[usize], orders: &OrderVector) -> u128 {
    assert_eq!(
        sizes.len(),
        orders.component_orders.len(),
        "orders must align with blocks"
    );
    let m = sizes.len();
    let components: u128 = sizes
        .iter()
        .zip(&orders.component_orders)
        .map(|(&a, &k)| pow(a, k) * (a as u128 - 1))
        .sum();
    components + (m as u128 - 1) * pow(m, orders.switch_order)
}

/// `kappa = (alpha - 1) m^k_sw prod_i alpha_i^k_i`, the size of an
/// unconstrained FSM source over the same product state machine.
pub fn count_fsm_params(partition: &Partition, orders: &OrderVector) -> u128 {
    fsm_params_from_sizes(&partition.block_sizes(), orders)
}

pub fn fsm_params_from_sizes(sizes: &[usize], orders: &OrderVector) -> u128 {
    assert_eq!(
        sizes.len(),
        orders.component_orders.len(),
        "orders must align with blocks"
    );
    let alpha: usize = sizes.iter().sum();
    let states: u128 = sizes
        .iter()
        .zip(&orders.component_orders)
        .map(|(&a, &k)| pow(a, k))
        .product();
    (alpha as u128 - 1) * pow(sizes.len(), orders.switch_order) * states
}

/// Increase of `kappa_I` when one memoryless component of an `m`-block IMP
/// splits in two: `m (m+1)^k_sw - (m-1) m^k_sw - 1`.
pub fn kappa_split_delta(m: usize, switch_order: usize) -> i128 {
    let m = m as i128;
    let k = switch_order as u32;
    m * (m + 1).pow(k) - (m - 1) * m.pow(k) - 1
}
