pub mod field;
pub mod group;
pub mod group_ring;
pub mod homoclinic;
pub mod lie;
pub mod rewrite;
pub mod schreier;
pub mod shift;
