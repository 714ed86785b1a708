void laplacian(const amrex::MultiFab& phi, amrex::MultiFab& lap, const amrex::Geometry& geom)
{
    const amrex::Real* dx = geom.CellSize();
    lap.setVal(0.0);
    amrex::Print() << "computing laplacian with dx " << dx[0] << "\n";
}
