"""Program-cost bounds, postselection processor and light-cone reduction"""
