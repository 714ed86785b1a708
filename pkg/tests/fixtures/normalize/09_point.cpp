double distance(const Point& a, const Point& b)
{
    Point diff;
    diff.x = a.x - b.x;
    diff.y = a.y - b.y;
    double squared = diff.x * diff.x + diff.y * diff.y;
    unsigned attempts = 0;
    while (squared < 0.0 && attempts < 3) { ++attempts; }
    return std::sqrt(squared);
}
