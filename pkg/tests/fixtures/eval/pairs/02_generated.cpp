double sum(const std::vector<double>& values)
{
    double s = 0;
    for (double v : values) s += v;
    return s;
}
