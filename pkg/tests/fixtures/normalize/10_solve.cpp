void solve_poisson(const amrex::Geometry& geom, const amrex::BoxArray& grids,
                   const amrex::DistributionMapping& dmap,
                   amrex::MultiFab& soln, const amrex::MultiFab& rhs)
{
    amrex::LPInfo info;
    info.setMaxCoarseningLevel(30);
    amrex::MLPoisson linop({geom}, {grids}, {dmap}, info);
    linop.setLevelBC(0, nullptr);
    amrex::MLMG solver(linop);
    const amrex::Real tol_rel = 1.e-10;
    const amrex::Real tol_abs = 0.0;
    solver.setVerbose(1);
    solver.solve({&soln}, {&rhs}, tol_rel, tol_abs);
}
