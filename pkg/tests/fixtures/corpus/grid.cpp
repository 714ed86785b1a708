// AI_METADATA
// example: Grid
// task_type: BOXARRAY_SETUP
// user_intent:
// 1) Define the problem domain and chop it into grids
// 2) Build a BoxArray with maxSize and a DistributionMapping
// keywords: Box, IntVect, BoxArray, maxSize, DistributionMapping
// inputs: int n_cell, int max_grid_size
// outputs: BoxArray ba, DistributionMapping dm

amrex::IntVect dom_lo(AMREX_D_DECL(0, 0, 0));
amrex::IntVect dom_hi(AMREX_D_DECL(n_cell-1, n_cell-1, n_cell-1));
amrex::Box domain(dom_lo, dom_hi);
amrex::BoxArray ba(domain);
ba.maxSize(max_grid_size);
amrex::DistributionMapping dm(ba);

// AI_METADATA
// example: Grid
// task_type: GEOMETRY_SETUP
// user_intent:
// 1) Create the geometry object with physical coordinates and periodic flags
// keywords: Geometry, RealBox, is_periodic, CoordSys
// inputs: Box domain
// outputs: Geometry geom

amrex::RealBox real_box({AMREX_D_DECL(0.0, 0.0, 0.0)}, {AMREX_D_DECL(1.0, 1.0, 1.0)});
amrex::Array<int,AMREX_SPACEDIM> is_periodic{AMREX_D_DECL(1, 1, 1)};
amrex::Geometry geom(domain, real_box, amrex::CoordSys::cartesian, is_periodic);
