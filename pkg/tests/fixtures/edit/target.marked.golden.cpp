#include <vector>

<<<<<<< current
void fill(std::vector<double>& a)
{
    // serial fill
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = 1.0;
    }
}
=======
void fill(amrex::MultiFab& mf)
{
    for (amrex::MFIter mfi(mf); mfi.isValid(); ++mfi) {
        auto arr = mf.array(mfi);
        amrex::ParallelFor(mfi.validbox(), [=] AMREX_GPU_DEVICE(int i, int j, int k) { arr(i,j,k) = 1.0; });
    }
}
>>>>>>> astra:codellama:13b-instruct

int main() { return 0; }
