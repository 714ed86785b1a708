#include <AMReX_MultiFab.H>
#include <cmath>

class Simulation {
public:
    explicit Simulation(int n_cell) : n_cell_(n_cell) {}

    void init_data(amrex::MultiFab& mf, const amrex::Real* dx)
    {
        for (amrex::MFIter mfi(mf); mfi.isValid(); ++mfi) {
            const amrex::Box& bx = mfi.validbox();
            auto const& arr = mf.array(mfi);
            amrex::ParallelFor(bx, [=] AMREX_GPU_DEVICE (int i, int j, int k) {
                amrex::Real x = (i + 0.5) * dx[0];
                arr(i,j,k) = 1.0 + std::exp(-x * x);
            });
        }
    }

    int n_cell() const { return n_cell_; }

private:
    int n_cell_;
    amrex::Real time_ = 0.0;
};
